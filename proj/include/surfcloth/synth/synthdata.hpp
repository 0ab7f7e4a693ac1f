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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "surfcloth/body/humanoid.hpp"
#include "surfcloth/body/pose.hpp"
#include "surfcloth/geom/template_body.hpp"

namespace surfcloth::synth {

/// One pose-dependent ridge family: amplitude scaled linearly by one
/// axis-angle component of one joint, shaped by a sinusoid over rest-pose
/// coordinates and confined to the skin region of `region_joints`.
struct WrinkleRidge {
  int joint = 0;
  int component = 0;  // axis-angle component 0..2
  double amplitude = 0.0;  // meters per radian
  Vec3 frequency = Vec3::Zero();  // radians per meter
  double phase = 0.0;
  std::vector<int> region_joints;
};

/// Procedural garment: a pose-invariant offset layer along the body normal
/// plus pose-dependent ridges that vanish at the rest pose.
struct OutfitSpec {
  std::string id;
  double base_amplitude = 0.0;        // meters
  std::vector<double> joint_coverage;  // per joint in [0, 1]; offset = amplitude * (skinning . coverage) * shape
  double shape_frequency = 0.0;        // radians per meter; 0 gives a flat layer
  std::vector<WrinkleRidge> ridges;
  double jitter = 0.0;  // Gaussian position noise (meters)
  std::uint64_t seed = 0;

  void validate(int joint_count) const;
  [[nodiscard]] nlohmann::json to_json() const;
  [[nodiscard]] static OutfitSpec from_json(const nlohmann::json& j);

  /// Loose jacket-like layer on the torso and arms with elbow/shoulder ridges.
  [[nodiscard]] static OutfitSpec loose_jacket(std::uint64_t seed = 1);
  /// Skirt-like layer around hips and thighs with hip-driven ridges.
  [[nodiscard]] static OutfitSpec skirt(std::uint64_t seed = 2);
};

/// Per-vertex pose-invariant offset (meters).
[[nodiscard]] Eigen::VectorXd base_offset(const TemplateBody& body, const OutfitSpec& spec);

/// Per-vertex pose-dependent offset (meters); linear in the joint angles.
[[nodiscard]] Eigen::VectorXd wrinkle_offset(const TemplateBody& body, const OutfitSpec& spec,
                                             const body::Pose& pose);

struct ScanCloud {
  PointCloud cloud;
  body::Pose pose;
  std::string outfit;
  std::vector<SurfacePoint> surface_points;  // where each point was drawn (synthetic only)
  std::vector<double> gt_base_offset;        // per point (synthetic only)
  std::vector<double> gt_wrinkle_offset;     // per point (synthetic only)
};

/// Points drawn area-uniformly on the posed body and pushed along the
/// interpolated posed normal by base + wrinkle offset. Normals come from the
/// displaced mesh.
[[nodiscard]] ScanCloud generate_scan(const TemplateBody& body, const OutfitSpec& spec,
                                      const body::Pose& pose, int count, std::uint64_t seed);

struct PoseSampling {
  double root_limit = 0.15;  // radians, per axis-angle component
  double spine_limit = 0.2;
  double limb_limit = 0.45;
};

/// Bounded random poses in antithetic pairs (theta, -theta), so any field
/// linear in the joint angles averages to zero over every complete pair.
[[nodiscard]] std::vector<body::Pose> sample_poses(const Skeleton& skeleton, int count,
                                                   std::uint64_t seed, const PoseSampling& limits = {});

struct DatasetEntry {
  std::string outfit;
  int pose_index = 0;
  std::string split;  // "train" or "test"
  std::string ply;    // relative to the dataset root
  std::string sidecar;
};

struct Manifest {
  std::filesystem::path root;
  std::uint64_t seed = 0;
  double train_fraction = 0.8;
  int points_per_scan = 0;
  nlohmann::json body;  // {"kind": "humanoid", "config": {...}} or {"kind": "rigged", "mesh", "skinning"}
  std::vector<OutfitSpec> outfits;
  std::vector<body::Pose> poses;
  std::vector<DatasetEntry> entries;

  [[nodiscard]] std::vector<DatasetEntry> split(const std::string& name) const;
  [[nodiscard]] nlohmann::json to_json() const;
};

struct DatasetConfig {
  int pose_count = 100;
  double train_fraction = 0.8;
  int points_per_scan = 4096;
  std::uint64_t seed = 0;
  PoseSampling limits;
};

/// Writes scans (PLY + JSON sidecar), poses.json and manifest.json under `root`.
/// Poses are split pairwise so each antithetic pair stays in one split.
Manifest generate_dataset(const TemplateBody& body, const nlohmann::json& body_source,
                          const std::vector<OutfitSpec>& specs, const DatasetConfig& config,
                          const std::filesystem::path& root);

[[nodiscard]] Manifest read_manifest(const std::filesystem::path& manifest_file);

/// Reads the PLY of an entry and the pose / offsets from its sidecar.
[[nodiscard]] ScanCloud load_scan(const Manifest& manifest, const DatasetEntry& entry);

/// Body described by a manifest's body source.
[[nodiscard]] TemplateBody load_body(const nlohmann::json& body_source,
                                     const std::filesystem::path& base_dir = {});
[[nodiscard]] nlohmann::json humanoid_source(const body::HumanoidConfig& config);

}  // namespace surfcloth::synth
