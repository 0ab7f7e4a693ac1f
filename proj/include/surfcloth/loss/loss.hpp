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

#include <span>
#include <vector>

#include <json.hpp>

#include "surfcloth/geom/kernels.hpp"
#include "surfcloth/geom/types.hpp"
#include "surfcloth/model/model.hpp"
#include "surfcloth/net/tape.hpp"

namespace surfcloth::loss {

struct LossWeights {
  double lambda_p = 2e4;
  double lambda_n = 0.1;
  double lambda_rgl = 2e3;
  double lambda_pd = 1.0;
  double lambda_gc = 5e-4;
  double normal_loss_start_fraction = 0.625;
  bool template_data_term = false;  // Chamfer on the r^g-only template as well (noisy-template ablation)

  void validate() const;
  [[nodiscard]] nlohmann::json to_json() const;
  [[nodiscard]] static LossWeights from_json(const nlohmann::json& j);
};

struct LossReport {
  double total = 0.0;
  double chamfer = 0.0;
  double normal = 0.0;
  double rgl_total = 0.0;
  double rgl_pose = 0.0;
  double rgl_code = 0.0;
  double template_chamfer = 0.0;  // only with template_data_term
};

struct DataTerms {
  double chamfer = 0.0;
  double normal = 0.0;
};

struct RegularizationTerms {
  double total = 0.0;  // mean ||r||^2
  double pose = 0.0;   // mean ||r^p||^2
  double code = 0.0;   // mean over vertices of ||code row||^2
};

/// Chamfer between predicted world points and the scan, and the mean L1
/// distance from each predicted normal to the normal of its nearest scan point.
[[nodiscard]] DataTerms data_loss(std::span<const model::DeformationSample> pred, const PointCloud& scan);
[[nodiscard]] DataTerms data_loss(const PointCloud& pred, const PointCloud& scan);

[[nodiscard]] RegularizationTerms regularization(std::span<const model::DeformationSample> pred,
                                                 const Matrix& garment_code);

/// The normal term is active from epoch ceil(fraction * total_epochs) on.
[[nodiscard]] bool normal_active(const LossWeights& w, int epoch, int total_epochs);

/// Weighted total of a report's terms.
[[nodiscard]] double total_loss(const LossReport& r, const LossWeights& w, int epoch, int total_epochs);

/// Differentiable objective of one decoded sample.
struct Objective {
  net::Var loss;
  LossReport report;
};

[[nodiscard]] Objective build_objective(net::Tape& tape, const model::DecodeVars& d, net::Var code,
                                        const KdTree& scan, std::span<const Vec3> scan_normals,
                                        const LossWeights& w, int epoch, int total_epochs);

}  // namespace surfcloth::loss
