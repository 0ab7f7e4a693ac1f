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
#include <string>
#include <vector>

#include <json.hpp>

#include "surfcloth/geom/surface.hpp"
#include "surfcloth/geom/template_body.hpp"
#include "surfcloth/geom/uv_atlas.hpp"
#include "surfcloth/model/model.hpp"
#include "surfcloth/synth/synthdata.hpp"

namespace surfcloth::harness {

// Reporting units: Chamfer in 1e-4 m^2, normal discrepancy in 1e-1.
inline constexpr double kChamferUnit = 1e-4;
inline constexpr double kNormalUnit = 1e-1;

struct ScanMetric {
  std::string outfit;
  int pose_index = 0;
  double chamfer = 0.0;  // reporting units
  double normal = 0.0;
};

struct OutfitMetric {
  std::string outfit;
  int scans = 0;
  double chamfer_mean = 0.0;
  double chamfer_max = 0.0;
  double normal_mean = 0.0;
  double normal_max = 0.0;
};

struct EvalReport {
  std::string split;
  int points = 0;
  std::vector<OutfitMetric> outfits;
  double chamfer_mean = 0.0;  // over all scans
  double chamfer_max = 0.0;
  double normal_mean = 0.0;
  double normal_max = 0.0;
  std::vector<ScanMetric> scans;

  [[nodiscard]] nlohmann::json to_json() const;
};

/// Chamfer and normal discrepancy of the model's output against every scan
/// of a split, over one fixed set of `points` surface points.
[[nodiscard]] EvalReport evaluate(const model::DeformationModel& model, const synth::Manifest& manifest,
                                  const std::string& split = "test", int points = 8192,
                                  std::uint64_t seed = 0);

/// Feature of a surface point read from a UV feature grid.
[[nodiscard]] Eigen::VectorXd uv_baseline_features(const TemplateBody& body, const UvAtlas& atlas,
                                                   const FeatureGrid& grid, const SurfacePoint& sp);

void export_cloud(const PointCloud& cloud, const std::filesystem::path& path);
void export_mesh(const TriMesh& mesh, const std::filesystem::path& path);
/// Identity-pose template of an outfit (r^g only) as a PLY cloud.
void export_template(const model::DeformationModel& model, const std::string& outfit,
                     const std::filesystem::path& path, int count = 8192, std::uint64_t seed = 0);

/// Interpolation jumps across shared mesh edges: surface interpolation versus
/// a UV grid rasterized from the same per-vertex field.
struct SeamStudy {
  int grid_resolution = 0;
  int samples = 0;
  int seam_samples = 0;
  double surface_max_jump = 0.0;
  double uv_seam_max_jump = 0.0;
  double uv_seam_mean_jump = 0.0;
  double uv_interior_max_jump = 0.0;

  [[nodiscard]] nlohmann::json to_json() const;
};

/// Samples `samples` random points on shared edges. An edge is a seam when
/// its two faces give different UV coordinates to an endpoint.
[[nodiscard]] SeamStudy seam_study(const TemplateBody& body, const Matrix& vertex_field,
                                   int grid_resolution, int samples, std::uint64_t seed);

[[nodiscard]] bool is_seam_edge(const UvAtlas& atlas, std::span<const Face> faces, const SharedEdge& e);

}  // namespace surfcloth::harness
