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

#include "surfcloth/harness/evaluate.hpp"

#include <algorithm>
#include <map>

#include "surfcloth/geom/io.hpp"
#include "surfcloth/loss/loss.hpp"
#include "surfcloth/random.hpp"

namespace surfcloth::harness {

using nlohmann::json;

json EvalReport::to_json() const {
  json per_outfit = json::array();
  for (const auto& o : outfits) {
    per_outfit.push_back({{"outfit", o.outfit},
                          {"scans", o.scans},
                          {"chamfer_mean", o.chamfer_mean},
                          {"chamfer_max", o.chamfer_max},
                          {"normal_mean", o.normal_mean},
                          {"normal_max", o.normal_max}});
  }
  json per_scan = json::array();
  for (const auto& s : scans) {
    per_scan.push_back({{"outfit", s.outfit}, {"pose_index", s.pose_index}, {"chamfer", s.chamfer},
                        {"normal", s.normal}});
  }
  return {{"split", split},
          {"points", points},
          {"units", {{"chamfer", "1e-4 m^2"}, {"normal", "1e-1"}}},
          {"chamfer_mean", chamfer_mean},
          {"chamfer_max", chamfer_max},
          {"normal_mean", normal_mean},
          {"normal_max", normal_max},
          {"outfits", per_outfit},
          {"scans", per_scan}};
}

EvalReport evaluate(const model::DeformationModel& model, const synth::Manifest& manifest,
                    const std::string& split, int points, std::uint64_t seed) {
  if (points < 1) throw Error("evaluation needs at least one point");
  const auto entries = manifest.split(split);
  if (entries.empty()) throw Error("dataset has no " + split + " scans");
  for (const auto& e : entries) {
    if (!model.has_outfit(e.outfit)) throw Error("model has no garment code for outfit " + e.outfit);
  }

  const model::PointSet ps = model.sample_points(points, seed);
  std::map<std::string, Matrix> garment;
  for (const auto& e : entries) {
    if (!garment.count(e.outfit)) garment[e.outfit] = model.garment_feature_values(e.outfit);
  }

  EvalReport report;
  report.split = split;
  report.points = points;
  report.scans.resize(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    const synth::ScanCloud scan = synth::load_scan(manifest, e);
    const body::PosedBody posed = body::lbs_pose(model.body(), manifest.poses.at(e.pose_index));
    const model::FrameSet fs = model.frames(posed, ps);
    net::Tape tape(model.params());
    const auto d = model.decode(tape, tape.constant(garment.at(e.outfit)), model.pose_features(tape, posed), ps, fs);
    PointCloud pred;
    const Matrix& x = tape.value(d.x_world);
    const Matrix& n = tape.value(d.n_world);
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
      pred.positions.push_back(x.row(r).transpose());
      pred.normals.push_back(n.row(r).transpose());
    }
    const loss::DataTerms t = loss::data_loss(pred, scan.cloud);
    report.scans[i] = {e.outfit, e.pose_index, t.chamfer / kChamferUnit, t.normal / kNormalUnit};
  }

  std::map<std::string, OutfitMetric> by_outfit;
  for (const auto& s : report.scans) {
    OutfitMetric& o = by_outfit[s.outfit];
    o.outfit = s.outfit;
    ++o.scans;
    o.chamfer_mean += s.chamfer;
    o.normal_mean += s.normal;
    o.chamfer_max = std::max(o.chamfer_max, s.chamfer);
    o.normal_max = std::max(o.normal_max, s.normal);
    report.chamfer_mean += s.chamfer;
    report.normal_mean += s.normal;
    report.chamfer_max = std::max(report.chamfer_max, s.chamfer);
    report.normal_max = std::max(report.normal_max, s.normal);
  }
  for (auto& [id, o] : by_outfit) {
    o.chamfer_mean /= o.scans;
    o.normal_mean /= o.scans;
    report.outfits.push_back(o);
  }
  report.chamfer_mean /= static_cast<double>(report.scans.size());
  report.normal_mean /= static_cast<double>(report.scans.size());
  return report;
}

Eigen::VectorXd uv_baseline_features(const TemplateBody& body, const UvAtlas& atlas,
                                     const FeatureGrid& grid, const SurfacePoint& sp) {
  if (sp.face < 0 || sp.face >= body.face_count()) throw Error("surface point face out of range");
  return bilinear_sample(grid, uv_at(atlas, sp));
}

void export_cloud(const PointCloud& cloud, const std::filesystem::path& path) {
  try {
    write_ply(path, cloud);
  } catch (const Error& e) {
    throw Error("export to " + path.string() + " failed: " + e.what());
  }
}

void export_mesh(const TriMesh& mesh, const std::filesystem::path& path) {
  try {
    write_obj(path, mesh);
  } catch (const Error& e) {
    throw Error("export to " + path.string() + " failed: " + e.what());
  }
}

void export_template(const model::DeformationModel& model, const std::string& outfit,
                     const std::filesystem::path& path, int count, std::uint64_t seed) {
  const auto points = model.sample_points(count, seed).points;
  export_cloud(model.template_preview(outfit, points), path);
}

json SeamStudy::to_json() const {
  return {{"grid_resolution", grid_resolution},
          {"samples", samples},
          {"seam_samples", seam_samples},
          {"surface_max_jump", surface_max_jump},
          {"uv_seam_max_jump", uv_seam_max_jump},
          {"uv_seam_mean_jump", uv_seam_mean_jump},
          {"uv_interior_max_jump", uv_interior_max_jump}};
}

bool is_seam_edge(const UvAtlas& atlas, std::span<const Face> faces, const SharedEdge& e) {
  auto corner_uv = [&](int face, int v) {
    for (int c = 0; c < 3; ++c) {
      if (faces[face][c] == v) return atlas.face_uvs[face][c];
    }
    throw Error("edge vertex not on face");
  };
  return corner_uv(e.face_a, e.v0) != corner_uv(e.face_b, e.v0) ||
         corner_uv(e.face_a, e.v1) != corner_uv(e.face_b, e.v1);
}

SeamStudy seam_study(const TemplateBody& body, const Matrix& vertex_field, int grid_resolution,
                     int samples, std::uint64_t seed) {
  if (!body.atlas) throw Error("seam study needs a template with a uv atlas");
  if (vertex_field.rows() != body.vertex_count()) throw Error("field must have one row per vertex");
  if (samples < 1) throw Error("seam study needs at least one sample");
  const UvAtlas& atlas = *body.atlas;
  const UvRaster raster = rasterize_atlas(atlas, body.faces, grid_resolution, grid_resolution);
  const FeatureGrid grid = rasterize_features(raster, vertex_field);
  const auto edges = shared_edges(body.faces);
  if (edges.empty()) throw Error("mesh has no shared edges");

  SeamStudy out;
  out.grid_resolution = grid_resolution;
  out.samples = samples;
  Rng rng(seed);
  double seam_sum = 0.0;
  for (int s = 0; s < samples; ++s) {
    const SharedEdge& e = edges[rng.below(edges.size())];
    const double t = rng.uniform();
    const SurfacePoint a = edge_point(body.faces, e.face_a, e.v0, e.v1, t);
    const SurfacePoint b = edge_point(body.faces, e.face_b, e.v0, e.v1, t);
    const double surf = (interpolate_feature(vertex_field, a) - interpolate_feature(vertex_field, b)).norm();
    out.surface_max_jump = std::max(out.surface_max_jump, surf);
    const double uv = (uv_baseline_features(body, atlas, grid, a) - uv_baseline_features(body, atlas, grid, b)).norm();
    if (is_seam_edge(atlas, body.faces, e)) {
      ++out.seam_samples;
      seam_sum += uv;
      out.uv_seam_max_jump = std::max(out.uv_seam_max_jump, uv);
    } else {
      out.uv_interior_max_jump = std::max(out.uv_interior_max_jump, uv);
    }
  }
  out.uv_seam_mean_jump = out.seam_samples > 0 ? seam_sum / out.seam_samples : 0.0;
  return out;
}

}  // namespace surfcloth::harness
