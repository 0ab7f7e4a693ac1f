// Copyright 2026 The surfcloth Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "surfcloth/model/model.hpp"

#include <algorithm>
#include <map>

#include "surfcloth/geom/surface.hpp"

namespace surfcloth::model {

using net::Tape;
using net::Var;

ModelConfig ModelConfig::desk() {
  ModelConfig c;
  c.pose_widths = {32, 32, 64, 64, 64, 64};
  c.garment_widths = {16, 16, 32, 32, 32, 32};
  c.pose_feature_width = 32;
  c.garment_feature_width = 32;
  c.decoder_hidden = {64, 64, 64, 64};
  return c;
}

void ModelConfig::validate() const {
  if (neighborhood < 1) throw Error("neighborhood size must be positive");
  if (pose_feature_width < 1 || garment_feature_width < 1 || code_width < 1) {
    throw Error("feature widths must be positive");
  }
  if (code_sigma < 0.0) throw Error("garment code scale must be non-negative");
  if (uv_features && uv_resolution < 2) throw Error("uv grid resolution must be at least 2");
}

nlohmann::json ModelConfig::to_json() const {
  return {{"abstraction_counts", abstraction_counts},
          {"neighborhood", neighborhood},
          {"pose_widths", pose_widths},
          {"garment_widths", garment_widths},
          {"pose_feature_width", pose_feature_width},
          {"garment_feature_width", garment_feature_width},
          {"code_width", code_width},
          {"code_sigma", code_sigma},
          {"decoder_hidden", decoder_hidden},
          {"decoder_skip", decoder_skip},
          {"decoder_output_gain", decoder_output_gain},
          {"pose_residual_input", pose_residual_input},
          {"garment_relative_positions", garment_relative_positions},
          {"etd", etd},
          {"garment_to_pose_decoder", garment_to_pose_decoder},
          {"uv_features", uv_features},
          {"uv_resolution", uv_resolution},
          {"seed", seed}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j) {
  ModelConfig c;
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  try {
    get("abstraction_counts", c.abstraction_counts);
    get("neighborhood", c.neighborhood);
    get("pose_widths", c.pose_widths);
    get("garment_widths", c.garment_widths);
    get("pose_feature_width", c.pose_feature_width);
    get("garment_feature_width", c.garment_feature_width);
    get("code_width", c.code_width);
    get("code_sigma", c.code_sigma);
    get("decoder_hidden", c.decoder_hidden);
    get("decoder_skip", c.decoder_skip);
    get("decoder_output_gain", c.decoder_output_gain);
    get("pose_residual_input", c.pose_residual_input);
    get("garment_relative_positions", c.garment_relative_positions);
    get("etd", c.etd);
    get("garment_to_pose_decoder", c.garment_to_pose_decoder);
    get("uv_features", c.uv_features);
    get("uv_resolution", c.uv_resolution);
    get("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("bad model config: ") + e.what());
  }
  return c;
}

net::RowMapPtr surface_interpolation_map(int vertex_count, std::span<const SurfacePoint> points) {
  std::vector<std::vector<net::RowMap::Entry>> rows(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (int c = 0; c < 3; ++c) rows[i].emplace_back(points[i].verts[c], points[i].bary[c]);
  }
  return std::make_shared<const net::RowMap>(vertex_count, rows);
}

net::RowMapPtr uv_interpolation_map(const UvAtlas& atlas, const UvRaster& raster, int vertex_count,
                                    std::span<const SurfacePoint> points) {
  std::vector<std::vector<net::RowMap::Entry>> rows(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const BilinearTap tap = bilinear_tap(raster.width, raster.height, uv_at(atlas, points[i]));
    std::map<int, double> merged;
    for (int k = 0; k < 4; ++k) {
      const SurfacePoint& t = raster.texels[tap.texel[k]];
      for (int c = 0; c < 3; ++c) merged[t.verts[c]] += tap.weight[k] * t.bary[c];
    }
    rows[i].assign(merged.begin(), merged.end());
  }
  return std::make_shared<const net::RowMap>(vertex_count, rows);
}

namespace {

std::vector<int> fit_widths(std::vector<int> widths, std::size_t levels) {
  if (widths.size() < levels) throw Error("encoder widths must cover every abstraction level");
  widths.resize(levels);
  return widths;
}

}  // namespace

DeformationModel::DeformationModel(TemplateBody body, ModelConfig config)
    : body_(std::move(body)), config_(std::move(config)), params_(config_.seed) {
  body_.validate(1e-6);
  config_.validate();
  const int n = body_.vertex_count();
  const std::vector<int> counts = config_.abstraction_counts.empty()
                                      ? net::EncoderConfig::default_counts(n)
                                      : config_.abstraction_counts;

  net::EncoderConfig pose_cfg;
  pose_cfg.abstraction_counts = counts;
  pose_cfg.widths = fit_widths(config_.pose_widths, counts.size());
  pose_cfg.k = config_.neighborhood;
  pose_cfg.output_width = config_.pose_feature_width;
  pose_cfg.use_relative_positions = true;

  net::EncoderConfig garment_cfg = pose_cfg;
  garment_cfg.widths = fit_widths(config_.garment_widths, counts.size());
  garment_cfg.output_width = config_.garment_feature_width;
  garment_cfg.use_relative_positions = config_.garment_relative_positions;

  FpsCache cache;
  topology_ = net::build_topology(body_.vertices, pose_cfg, &cache);
  pose_encoder_ = std::make_unique<net::PointEncoder>(
      "pose_enc", pose_cfg, config_.pose_residual_input ? 6 : 3, topology_);
  garment_encoder_ =
      std::make_unique<net::PointEncoder>("garment_enc", garment_cfg, config_.code_width, topology_);

  const int cg = config_.garment_feature_width;
  const int cp = config_.pose_feature_width;
  net::MlpConfig dec;
  dec.hidden = config_.decoder_hidden;
  dec.skip_layer = config_.decoder_skip;
  dec.output_gain = config_.decoder_output_gain;
  if (config_.etd) {
    net::MlpConfig g = dec;
    g.input_width = cg + 3;
    g.output_width = 3;
    garment_decoder_ = std::make_unique<net::Mlp>("dec_g", g);
    net::MlpConfig p = dec;
    p.input_width = (config_.garment_to_pose_decoder ? cg : 0) + cp + 3;
    p.output_width = 6;
    pose_decoder_ = std::make_unique<net::Mlp>("dec_p", p);
  } else {
    net::MlpConfig p = dec;
    p.input_width = cg + cp + 3;
    p.output_width = 6;
    pose_decoder_ = std::make_unique<net::Mlp>("dec", p);
  }

  pose_encoder_->register_parameters(params_);
  garment_encoder_->register_parameters(params_);
  if (garment_decoder_) garment_decoder_->register_parameters(params_);
  pose_decoder_->register_parameters(params_);

  if (config_.uv_features) {
    if (!body_.atlas) throw Error("uv feature baseline needs a template with a uv atlas");
    raster_ = std::make_shared<const UvRaster>(
        rasterize_atlas(*body_.atlas, body_.faces, config_.uv_resolution, config_.uv_resolution));
  }
}

std::string DeformationModel::code_name(const std::string& outfit) const { return "code/" + outfit; }

int DeformationModel::add_outfit(const std::string& outfit) {
  if (outfit.empty()) throw Error("outfit id must not be empty");
  if (!has_outfit(outfit)) outfits_.push_back(outfit);
  return params_.add(code_name(outfit), body_.vertex_count(), config_.code_width, net::Init::kNormal,
                     config_.code_sigma);
}

bool DeformationModel::has_outfit(const std::string& outfit) const {
  return std::find(outfits_.begin(), outfits_.end(), outfit) != outfits_.end();
}

void DeformationModel::require_outfit(const std::string& outfit) const {
  if (!has_outfit(outfit)) throw Error("unknown outfit " + outfit);
}

PointSet DeformationModel::make_points(std::vector<SurfacePoint> points) const {
  if (points.empty()) throw Error("empty point set");
  PointSet ps;
  ps.p_t.resize(static_cast<Eigen::Index>(points.size()), 3);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& sp = points[i];
    if (sp.face < 0 || sp.face >= body_.face_count()) throw Error("surface point face out of range");
    ps.p_t.row(static_cast<Eigen::Index>(i)) = position_at(body_.vertices, sp).transpose();
  }
  ps.interp = raster_ ? uv_interpolation_map(*body_.atlas, *raster_, body_.vertex_count(), points)
                      : surface_interpolation_map(body_.vertex_count(), points);
  ps.points = std::move(points);
  return ps;
}

PointSet DeformationModel::sample_points(int count, std::uint64_t seed) const {
  return make_points(sample_surface(body_.vertices, body_.faces, count, seed));
}

FrameSet DeformationModel::frames(const body::PosedBody& posed, const PointSet& points) const {
  const auto m = static_cast<Eigen::Index>(points.points.size());
  auto rot = std::make_shared<std::vector<Mat3>>(points.points.size());
  FrameSet fs;
  fs.origins.resize(m, 3);
#pragma omp parallel for schedule(static)
  for (Eigen::Index i = 0; i < m; ++i) {
    const LocalFrame f = local_frame(posed.vertices, posed.normals, points.points[i]);
    (*rot)[i] = f.rotation;
    fs.origins.row(i) = f.origin.transpose();
  }
  fs.rotations = std::move(rot);
  return fs;
}

Matrix DeformationModel::pose_input(const body::PosedBody& posed) const {
  const int n = body_.vertex_count();
  if (static_cast<int>(posed.vertices.size()) != n) {
    throw Error("posed body has " + std::to_string(posed.vertices.size()) + " vertices, template has " +
                std::to_string(n));
  }
  Matrix in(n, config_.pose_residual_input ? 6 : 3);
  for (int i = 0; i < n; ++i) {
    in.block<1, 3>(i, 0) = posed.vertices[i].transpose();
    if (config_.pose_residual_input) {
      in.block<1, 3>(i, 3) = (posed.vertices[i] - body_.vertices[i]).transpose();
    }
  }
  return in;
}

Var DeformationModel::garment_features(Tape& tape, const std::string& outfit) const {
  require_outfit(outfit);
  return garment_encoder_->forward(tape, tape.param(code_name(outfit)));
}

Var DeformationModel::pose_features(Tape& tape, const body::PosedBody& posed) const {
  return pose_encoder_->forward(tape, tape.constant(pose_input(posed)));
}

DecodeVars DeformationModel::decode(Tape& tape, Var garment_vertex_features,
                                    Var pose_vertex_features, const PointSet& points,
                                    const FrameSet& frames, bool want_template) const {
  const auto m = static_cast<Eigen::Index>(points.points.size());
  if (frames.origins.rows() != m) throw Error("frames do not match the point set");
  Var pt = tape.constant(points.p_t);
  Var g = tape.rows(garment_vertex_features, points.interp);
  Var p = tape.rows(pose_vertex_features, points.interp);

  DecodeVars out;
  Var head;
  if (config_.etd) {
    out.r_g = garment_decoder_->forward(tape, tape.concat_cols({g, pt}));
    head = config_.garment_to_pose_decoder ? pose_decoder_->forward(tape, tape.concat_cols({g, p, pt}))
                                           : pose_decoder_->forward(tape, tape.concat_cols({p, pt}));
    out.r_p = tape.slice_cols(head, 0, 3);
    out.r = tape.add(out.r_g, out.r_p);
  } else {
    head = pose_decoder_->forward(tape, tape.concat_cols({g, p, pt}));
    out.r_p = tape.slice_cols(head, 0, 3);
    out.r = out.r_p;
  }
  out.normal_raw = tape.slice_cols(head, 3, 3);
  out.x_world = tape.add_constant(tape.rotate_rows(out.r, frames.rotations), frames.origins);
  Matrix ez = Matrix::Zero(m, 3);
  ez.col(2).setOnes();
  out.n_world = tape.normalize_rows(
      tape.rotate_rows(tape.add_constant(out.normal_raw, ez), frames.rotations));
  if (want_template && config_.etd) {
    out.x_template = tape.add_constant(tape.rotate_rows(out.r_g, frames.rotations), frames.origins);
  }
  return out;
}

Matrix DeformationModel::garment_feature_values(const std::string& outfit) const {
  Tape tape(params_);
  return tape.value(garment_features(tape, outfit));
}

Matrix DeformationModel::garment_displacement(const Matrix& garment_vertex_features,
                                              const PointSet& points) const {
  const auto m = static_cast<Eigen::Index>(points.points.size());
  if (!config_.etd) return Matrix::Zero(m, 3);
  Tape tape(params_);
  Var g = tape.rows(tape.constant(garment_vertex_features), points.interp);
  return tape.value(garment_decoder_->forward(tape, tape.concat_cols({g, tape.constant(points.p_t)})));
}

std::vector<DeformationSample> DeformationModel::forward(const body::Pose& pose,
                                                         const std::string& outfit,
                                                         std::span<const SurfacePoint> points) const {
  require_outfit(outfit);
  const body::PosedBody posed = body::lbs_pose(body_, pose);
  const PointSet ps = make_points({points.begin(), points.end()});
  const FrameSet fs = frames(posed, ps);
  Tape tape(params_);
  const DecodeVars d = decode(tape, garment_features(tape, outfit), pose_features(tape, posed), ps, fs);

  std::vector<DeformationSample> out(ps.points.size());
  const Matrix& r_p = tape.value(d.r_p);
  const Matrix& nraw = tape.value(d.normal_raw);
  const Matrix& x = tape.value(d.x_world);
  const Matrix& nw = tape.value(d.n_world);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    DeformationSample& s = out[i];
    s.sp = ps.points[i];
    s.p_t = ps.p_t.row(r).transpose();
    s.p_u = fs.origins.row(r).transpose();
    s.frame.rotation = (*fs.rotations)[i];
    s.frame.origin = s.p_u;
    if (d.r_g.valid()) s.r_g = tape.value(d.r_g).row(r).transpose();
    s.r_p = r_p.row(r).transpose();
    s.normal_local = nraw.row(r).transpose() + Vec3::UnitZ();
    s.x_world = x.row(r).transpose();
    s.n_world = nw.row(r).transpose();
  }
  return out;
}

PointCloud DeformationModel::template_preview(const std::string& outfit,
                                              std::span<const SurfacePoint> points) const {
  require_outfit(outfit);
  const PointSet ps = make_points({points.begin(), points.end()});
  const body::PosedBody rest{body_.vertices, body_.normals};
  const FrameSet fs = frames(rest, ps);
  const Matrix rg = garment_displacement(garment_feature_values(outfit), ps);
  PointCloud cloud;
  cloud.positions.resize(ps.points.size());
  cloud.normals.resize(ps.points.size());
  for (std::size_t i = 0; i < ps.points.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const Mat3& rot = (*fs.rotations)[i];
    cloud.positions[i] = rot * rg.row(r).transpose() + fs.origins.row(r).transpose();
    cloud.normals[i] = rot.col(2);
  }
  return cloud;
}

std::vector<PointCloud> DeformationModel::animate(std::span<const body::Pose> poses,
                                                  const std::string& outfit, int count,
                                                  std::uint64_t seed) const {
  require_outfit(outfit);
  const PointSet ps = sample_points(count, seed);
  const Matrix garment = garment_feature_values(outfit);
  std::vector<PointCloud> clouds;
  clouds.reserve(poses.size());
  for (const body::Pose& pose : poses) {
    const body::PosedBody posed = body::lbs_pose(body_, pose);
    const FrameSet fs = frames(posed, ps);
    Tape tape(params_);
    const DecodeVars d = decode(tape, tape.constant(garment), pose_features(tape, posed), ps, fs);
    PointCloud c;
    const Matrix& x = tape.value(d.x_world);
    const Matrix& n = tape.value(d.n_world);
    c.positions.resize(ps.points.size());
    c.normals.resize(ps.points.size());
    for (std::size_t i = 0; i < ps.points.size(); ++i) {
      c.positions[i] = x.row(static_cast<Eigen::Index>(i)).transpose();
      c.normals[i] = n.row(static_cast<Eigen::Index>(i)).transpose();
    }
    clouds.push_back(std::move(c));
  }
  return clouds;
}

net::ParameterStore init_parameters(const TemplateBody& body, const ModelConfig& config) {
  DeformationModel m(body, config);
  return std::move(m.params());
}

}  // namespace surfcloth::model
