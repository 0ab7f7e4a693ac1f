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

#include "surfcloth/synth/synthdata.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "surfcloth/body/rig_io.hpp"
#include "surfcloth/geom/io.hpp"
#include "surfcloth/geom/surface.hpp"
#include "surfcloth/random.hpp"

namespace surfcloth::synth {

using nlohmann::json;

void OutfitSpec::validate(int joint_count) const {
  if (id.empty()) throw Error("outfit id must not be empty");
  if (base_amplitude < 0.0 || jitter < 0.0) throw Error("outfit " + id + ": amplitudes must be >= 0");
  if (static_cast<int>(joint_coverage.size()) > joint_count) {
    throw Error("outfit " + id + ": coverage lists more joints than the skeleton has");
  }
  for (double c : joint_coverage) {
    if (!(c >= 0.0 && c <= 1.0)) throw Error("outfit " + id + ": coverage must lie in [0, 1]");
  }
  for (const auto& r : ridges) {
    if (r.amplitude < 0.0) throw Error("outfit " + id + ": ridge amplitude must be >= 0");
    if (r.joint < 0 || r.joint >= joint_count || r.component < 0 || r.component > 2) {
      throw Error("outfit " + id + ": ridge joint or component out of range");
    }
    for (int j : r.region_joints) {
      if (j < 0 || j >= joint_count) throw Error("outfit " + id + ": ridge region joint out of range");
    }
  }
}

json OutfitSpec::to_json() const {
  json ridges_j = json::array();
  for (const auto& r : ridges) {
    ridges_j.push_back({{"joint", r.joint},
                        {"component", r.component},
                        {"amplitude", r.amplitude},
                        {"frequency", {r.frequency.x(), r.frequency.y(), r.frequency.z()}},
                        {"phase", r.phase},
                        {"region_joints", r.region_joints}});
  }
  return {{"id", id},
          {"base_amplitude", base_amplitude},
          {"joint_coverage", joint_coverage},
          {"shape_frequency", shape_frequency},
          {"ridges", ridges_j},
          {"jitter", jitter},
          {"seed", seed}};
}

OutfitSpec OutfitSpec::from_json(const json& j) {
  OutfitSpec s;
  try {
    j.at("id").get_to(s.id);
    j.at("base_amplitude").get_to(s.base_amplitude);
    j.at("joint_coverage").get_to(s.joint_coverage);
    s.shape_frequency = j.value("shape_frequency", 0.0);
    s.jitter = j.value("jitter", 0.0);
    s.seed = j.value("seed", std::uint64_t{0});
    for (const auto& r : j.value("ridges", json::array())) {
      WrinkleRidge w;
      r.at("joint").get_to(w.joint);
      r.at("component").get_to(w.component);
      r.at("amplitude").get_to(w.amplitude);
      const auto f = r.at("frequency").get<std::vector<double>>();
      if (f.size() != 3) throw Error("ridge frequency must have 3 entries");
      w.frequency = Vec3(f[0], f[1], f[2]);
      w.phase = r.value("phase", 0.0);
      r.at("region_joints").get_to(w.region_joints);
      s.ridges.push_back(std::move(w));
    }
  } catch (const json::exception& e) {
    throw Error(std::string("bad outfit spec: ") + e.what());
  }
  return s;
}

// Joint indices below follow the built-in humanoid skeleton.
OutfitSpec OutfitSpec::loose_jacket(std::uint64_t seed) {
  OutfitSpec s;
  s.id = "jacket";
  s.seed = seed;
  s.base_amplitude = 0.03;
  s.joint_coverage = {0.7, 1.0, 1.0, 0.0, 0.8, 0.5, 0.0, 0.8, 0.5, 0.0, 0.2, 0.0, 0.0, 0.2, 0.0, 0.0};
  s.shape_frequency = 8.0;
  s.ridges = {
      {5, 2, 0.02, Vec3(30.0, 0.0, 20.0), 0.3, {4, 5}},
      {8, 2, 0.02, Vec3(-30.0, 0.0, 20.0), 1.1, {7, 8}},
      {4, 2, 0.015, Vec3(25.0, 10.0, 0.0), 0.7, {2, 4}},
      {7, 2, 0.015, Vec3(-25.0, 10.0, 0.0), 2.0, {2, 7}},
      {1, 0, 0.015, Vec3(0.0, 25.0, 15.0), 0.0, {1, 2}},
  };
  return s;
}

OutfitSpec OutfitSpec::skirt(std::uint64_t seed) {
  OutfitSpec s;
  s.id = "skirt";
  s.seed = seed;
  s.base_amplitude = 0.04;
  s.joint_coverage = {1.0, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.9, 0.3, 0.0, 0.9, 0.3, 0.0};
  s.shape_frequency = 6.0;
  s.ridges = {
      {10, 0, 0.02, Vec3(0.0, 20.0, 30.0), 0.4, {0, 10}},
      {13, 0, 0.02, Vec3(0.0, 20.0, -30.0), 1.3, {0, 13}},
  };
  return s;
}

Eigen::VectorXd base_offset(const TemplateBody& body, const OutfitSpec& spec) {
  spec.validate(body.skeleton.joint_count());
  const int n = body.vertex_count();
  Eigen::VectorXd out(n);
  for (int v = 0; v < n; ++v) {
    double cover = 0.0;
    for (std::size_t j = 0; j < spec.joint_coverage.size(); ++j) {
      cover += body.skinning(v, static_cast<Eigen::Index>(j)) * spec.joint_coverage[j];
    }
    const Vec3& p = body.vertices[v];
    const double shape =
        1.0 + 0.35 * std::sin(spec.shape_frequency * p.y() + 0.5 * spec.shape_frequency * p.x());
    out(v) = spec.base_amplitude * cover * shape;
  }
  return out;
}

Eigen::VectorXd wrinkle_offset(const TemplateBody& body, const OutfitSpec& spec, const body::Pose& pose) {
  spec.validate(body.skeleton.joint_count());
  if (pose.joint_count() != body.skeleton.joint_count()) throw Error("pose joint count mismatch");
  const std::vector<Vec3> aa = pose.axis_angles();
  const int n = body.vertex_count();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (const WrinkleRidge& r : spec.ridges) {
    const double theta = aa[r.joint][r.component];
    for (int v = 0; v < n; ++v) {
      double region = 0.0;
      for (int j : r.region_joints) region += body.skinning(v, j);
      out(v) += r.amplitude * theta * std::sin(r.frequency.dot(body.vertices[v]) + r.phase) * region;
    }
  }
  return out;
}

namespace {

double interpolate(const Eigen::VectorXd& field, const SurfacePoint& sp) {
  return sp.bary[0] * field(sp.verts[0]) + sp.bary[1] * field(sp.verts[1]) + sp.bary[2] * field(sp.verts[2]);
}

Vec3 interpolate_unit(std::span<const Vec3> normals, const SurfacePoint& sp) {
  const Vec3 n = sp.bary[0] * normals[sp.verts[0]] + sp.bary[1] * normals[sp.verts[1]] +
                 sp.bary[2] * normals[sp.verts[2]];
  const double len = n.norm();
  if (len == 0.0) throw Error("zero normal on the posed surface");
  return n / len;
}

}  // namespace

ScanCloud generate_scan(const TemplateBody& body, const OutfitSpec& spec, const body::Pose& pose,
                        int count, std::uint64_t seed) {
  if (count < 1) throw Error("scan point count must be positive");
  const body::PosedBody posed = body::lbs_pose(body, pose);
  const Eigen::VectorXd base = base_offset(body, spec);
  const Eigen::VectorXd wrinkle = wrinkle_offset(body, spec, pose);

  std::vector<Vec3> displaced(posed.vertices.size());
  for (std::size_t v = 0; v < displaced.size(); ++v) {
    displaced[v] = posed.vertices[v] + (base(v) + wrinkle(v)) * posed.normals[v];
  }
  const std::vector<Vec3> displaced_normals = vertex_normals(displaced, body.faces);

  ScanCloud scan;
  scan.pose = pose;
  scan.outfit = spec.id;
  scan.surface_points = sample_surface(posed.vertices, body.faces, count, seed);
  scan.cloud.positions.resize(count);
  scan.cloud.normals.resize(count);
  scan.gt_base_offset.resize(count);
  scan.gt_wrinkle_offset.resize(count);
  Rng noise(mix_seed(seed, spec.seed));
  for (int i = 0; i < count; ++i) {
    const SurfacePoint& sp = scan.surface_points[i];
    const double b = interpolate(base, sp);
    const double w = interpolate(wrinkle, sp);
    scan.gt_base_offset[i] = b;
    scan.gt_wrinkle_offset[i] = w;
    Vec3 x = position_at(posed.vertices, sp) + (b + w) * interpolate_unit(posed.normals, sp);
    if (spec.jitter > 0.0) {
      x += spec.jitter * Vec3(noise.normal(), noise.normal(), noise.normal());
    }
    scan.cloud.positions[i] = x;
    scan.cloud.normals[i] = interpolate_unit(displaced_normals, sp);
  }
  return scan;
}

std::vector<body::Pose> sample_poses(const Skeleton& skeleton, int count, std::uint64_t seed,
                                     const PoseSampling& limits) {
  if (count < 1) throw Error("pose count must be positive");
  const int joints = skeleton.joint_count();
  std::vector<double> limit(joints, limits.limb_limit);
  for (int j = 0; j < joints; ++j) {
    const std::string& name = j < static_cast<int>(skeleton.names.size()) ? skeleton.names[j] : "";
    if (skeleton.parents[j] < 0) {
      limit[j] = limits.root_limit;
    } else if (name.find("spine") != std::string::npos || name.find("chest") != std::string::npos ||
               name.find("neck") != std::string::npos) {
      limit[j] = limits.spine_limit;
    }
  }
  std::vector<body::Pose> poses;
  poses.reserve(count);
  for (int pair = 0; static_cast<int>(poses.size()) < count; ++pair) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(pair)));
    std::vector<Vec3> aa(joints);
    for (int j = 0; j < joints; ++j) {
      for (int c = 0; c < 3; ++c) aa[j][c] = rng.uniform(-limit[j], limit[j]);
    }
    poses.push_back(body::Pose::from_axis_angle(aa));
    if (static_cast<int>(poses.size()) == count) break;
    for (Vec3& a : aa) a = -a;
    poses.push_back(body::Pose::from_axis_angle(aa));
  }
  return poses;
}

std::vector<DatasetEntry> Manifest::split(const std::string& name) const {
  std::vector<DatasetEntry> out;
  for (const auto& e : entries) {
    if (e.split == name) out.push_back(e);
  }
  return out;
}

json Manifest::to_json() const {
  json outfits_j = json::array();
  for (const auto& o : outfits) outfits_j.push_back(o.to_json());
  json entries_j = json::array();
  for (const auto& e : entries) {
    entries_j.push_back({{"outfit", e.outfit},
                         {"pose_index", e.pose_index},
                         {"split", e.split},
                         {"ply", e.ply},
                         {"sidecar", e.sidecar}});
  }
  return {{"format", "surfcloth-dataset"},
          {"version", 1},
          {"seed", seed},
          {"train_fraction", train_fraction},
          {"points_per_scan", points_per_scan},
          {"body", body},
          {"outfits", outfits_j},
          {"poses", "poses.json"},
          {"entries", entries_j}};
}

json humanoid_source(const body::HumanoidConfig& c) {
  return {{"kind", "humanoid"},
          {"config",
           {{"subdivisions", c.subdivisions},
            {"rings_per_segment", c.rings_per_segment},
            {"height_scale", c.height_scale},
            {"girth_scale", c.girth_scale},
            {"skin_falloff", c.skin_falloff}}}};
}

TemplateBody load_body(const json& source, const std::filesystem::path& base_dir) {
  const std::string kind = source.value("kind", "");
  if (kind == "humanoid") {
    body::HumanoidConfig c;
    const json cfg = source.value("config", json::object());
    c.subdivisions = cfg.value("subdivisions", c.subdivisions);
    c.rings_per_segment = cfg.value("rings_per_segment", c.rings_per_segment);
    c.height_scale = cfg.value("height_scale", c.height_scale);
    c.girth_scale = cfg.value("girth_scale", c.girth_scale);
    c.skin_falloff = cfg.value("skin_falloff", c.skin_falloff);
    return body::build_humanoid(c);
  }
  if (kind == "rigged") {
    auto resolve = [&base_dir](const std::string& p) {
      const std::filesystem::path path(p);
      return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
    };
    return body::load_rigged_mesh(resolve(source.at("mesh").get<std::string>()),
                                  resolve(source.at("skinning").get<std::string>()));
  }
  throw Error("unknown body source kind '" + kind + "'");
}

Manifest generate_dataset(const TemplateBody& body, const json& body_source,
                          const std::vector<OutfitSpec>& specs, const DatasetConfig& config,
                          const std::filesystem::path& root) {
  if (config.pose_count < 2) throw Error("a dataset needs at least 2 poses");
  if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) {
    throw Error("train fraction must lie in (0, 1)");
  }
  if (specs.empty()) throw Error("a dataset needs at least one outfit");
  for (const auto& s : specs) s.validate(body.skeleton.joint_count());

  Manifest m;
  m.root = root;
  m.seed = config.seed;
  m.train_fraction = config.train_fraction;
  m.points_per_scan = config.points_per_scan;
  m.body = body_source;
  m.outfits = specs;
  m.poses = sample_poses(body.skeleton, config.pose_count, mix_seed(config.seed, fnv1a("poses")),
                         config.limits);

  // shuffle whole pairs, then fill the train split in pair order
  const int pairs = (config.pose_count + 1) / 2;
  std::vector<int> pair_order(pairs);
  std::iota(pair_order.begin(), pair_order.end(), 0);
  Rng rng(mix_seed(config.seed, fnv1a("split")));
  shuffle(pair_order.begin(), pair_order.end(), rng);
  const int n_train = std::clamp(static_cast<int>(std::lround(config.train_fraction * config.pose_count)),
                                 1, config.pose_count - 1);
  std::vector<std::string> split(config.pose_count);
  int assigned = 0;
  for (int p : pair_order) {
    for (int k = 0; k < 2; ++k) {
      const int pose = 2 * p + k;
      if (pose >= config.pose_count) continue;
      split[pose] = assigned < n_train ? "train" : "test";
      ++assigned;
    }
  }

  std::filesystem::create_directories(root / "scans");
  body::write_pose_sequence(root / "poses.json", m.poses);
  for (const auto& spec : specs) {
    for (int p = 0; p < config.pose_count; ++p) {
      char stem[256];
      std::snprintf(stem, sizeof stem, "scans/%s_%04d", spec.id.c_str(), p);
      m.entries.push_back({spec.id, p, split[p], std::string(stem) + ".ply", std::string(stem) + ".json"});
    }
  }

  const int total = static_cast<int>(m.entries.size());
  std::vector<std::string> errors(total);
#pragma omp parallel for schedule(dynamic)
  for (int e = 0; e < total; ++e) {
    try {
      const DatasetEntry& entry = m.entries[e];
      const OutfitSpec& spec =
          *std::find_if(specs.begin(), specs.end(), [&](const OutfitSpec& s) { return s.id == entry.outfit; });
      const std::uint64_t scan_seed =
          mix_seed(mix_seed(config.seed, fnv1a(entry.outfit)), static_cast<std::uint64_t>(entry.pose_index));
      const ScanCloud scan = generate_scan(body, spec, m.poses[entry.pose_index], config.points_per_scan, scan_seed);
      write_ply(root / entry.ply, scan.cloud);
      json side = {{"outfit", entry.outfit},
                   {"pose_index", entry.pose_index},
                   {"split", entry.split},
                   {"pose", body::pose_to_json(scan.pose)},
                   {"gt_base_offset", scan.gt_base_offset},
                   {"gt_wrinkle_offset", scan.gt_wrinkle_offset}};
      std::ofstream out(root / entry.sidecar);
      out << side.dump();
      if (!out) throw Error("cannot write " + (root / entry.sidecar).string());
    } catch (const std::exception& ex) {
      errors[e] = ex.what();
    }
  }
  for (const auto& err : errors) {
    if (!err.empty()) throw Error(err);
  }
  std::ofstream out(root / "manifest.json");
  out << m.to_json().dump(2) << '\n';
  if (!out) throw Error("cannot write " + (root / "manifest.json").string());
  return m;
}

Manifest read_manifest(const std::filesystem::path& manifest_file) {
  std::ifstream in(manifest_file);
  if (!in) throw Error("cannot open " + manifest_file.string());
  Manifest m;
  try {
    const json j = json::parse(in);
    if (j.value("format", "") != "surfcloth-dataset") throw Error(manifest_file.string() + ": not a dataset manifest");
    m.root = manifest_file.parent_path();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.train_fraction = j.at("train_fraction").get<double>();
    m.points_per_scan = j.at("points_per_scan").get<int>();
    m.body = j.at("body");
    for (const auto& o : j.at("outfits")) m.outfits.push_back(OutfitSpec::from_json(o));
    m.poses = body::read_pose_sequence(m.root / j.at("poses").get<std::string>());
    for (const auto& e : j.at("entries")) {
      m.entries.push_back({e.at("outfit").get<std::string>(), e.at("pose_index").get<int>(),
                           e.at("split").get<std::string>(), e.at("ply").get<std::string>(),
                           e.at("sidecar").get<std::string>()});
      if (m.entries.back().pose_index < 0 || m.entries.back().pose_index >= static_cast<int>(m.poses.size())) {
        throw Error(manifest_file.string() + ": entry pose index out of range");
      }
    }
  } catch (const json::exception& e) {
    throw Error(manifest_file.string() + ": " + e.what());
  }
  return m;
}

ScanCloud load_scan(const Manifest& manifest, const DatasetEntry& entry) {
  const auto ply = manifest.root / entry.ply;
  if (!std::filesystem::exists(ply)) throw Error("missing scan " + ply.string());
  ScanCloud scan;
  scan.cloud = read_ply(ply);
  scan.outfit = entry.outfit;
  scan.pose = manifest.poses.at(entry.pose_index);
  const auto side = manifest.root / entry.sidecar;
  std::ifstream in(side);
  if (in) {
    try {
      const json j = json::parse(in);
      j.at("gt_base_offset").get_to(scan.gt_base_offset);
      j.at("gt_wrinkle_offset").get_to(scan.gt_wrinkle_offset);
    } catch (const json::exception& e) {
      throw Error(side.string() + ": " + e.what());
    }
  }
  return scan;
}

}  // namespace surfcloth::synth
