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

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "surfcloth/geom/kernels.hpp"
#include "surfcloth/geom/types.hpp"
#include "surfcloth/net/params.hpp"
#include "surfcloth/net/tape.hpp"

namespace surfcloth::net {

/// Hierarchical point-set encoder settings. Level l (1-based) keeps
/// abstraction_counts[l-1] centers chosen by farthest-point sampling from
/// level l-1 and pools over their k nearest neighbors.
struct EncoderConfig {
  std::vector<int> abstraction_counts{512, 256, 128, 64, 32, 16};
  std::vector<int> widths{64, 64, 128, 128, 128, 128};  // set-abstraction width per level
  int k = 16;
  int output_width = 64;
  bool use_relative_positions = true;  // feed (neighbor - center) into each grouping layer

  /// Throws on empty or non-decreasing counts, zero widths, or counts that
  /// exceed the available points.
  void validate(int vertex_count) const;

  /// Default counts for a template with `vertex_count` vertices: the six
  /// halvings from 2048 when N >= 6890, otherwise from 512 (clamped to N).
  [[nodiscard]] static std::vector<int> default_counts(int vertex_count, int levels = 6);
};

/// Static grouping of a constant point set (the T-pose template): centers,
/// neighbor tables and upsampling weights per level. Built once and reused.
struct EncoderTopology {
  int levels = 0;
  std::vector<std::vector<Vec3>> positions;  // per level, level 0 = input points
  std::vector<std::vector<int>> centers;     // per level >= 1, indices into level l-1
  std::vector<int> group_size;               // per level >= 1
  std::vector<RowMapPtr> gather;             // level l-1 rows -> (count_l * group) rows
  std::vector<Matrix> relative;              // (count_l * group) x 3, neighbor - center
  std::vector<RowMapPtr> upsample;           // level l rows -> level l-1 rows (3-NN)
};

[[nodiscard]] std::shared_ptr<const EncoderTopology> build_topology(std::span<const Vec3> points,
                                                                     const EncoderConfig& config,
                                                                     FpsCache* cache = nullptr);

/// Inverse-squared-distance interpolation from `source` to every `target`
/// point over its 3 nearest sources (fewer if the source set is smaller).
[[nodiscard]] RowMapPtr interpolation_map(std::span<const Vec3> source,
                                          std::span<const Vec3> target);

/// PointNet++-style encoder over a static topology. Each abstraction level is
/// Linear -> ReLU -> max over the group; each propagation step upsamples,
/// concatenates the skip features of the finer level and applies
/// Linear -> ReLU; a final Linear maps to `output_width`.
class PointEncoder {
 public:
  PointEncoder(std::string prefix, EncoderConfig config, int input_width,
               std::shared_ptr<const EncoderTopology> topology);

  void register_parameters(ParameterStore& store) const;
  [[nodiscard]] Var forward(Tape& tape, Var input) const;

  [[nodiscard]] const EncoderConfig& config() const { return config_; }
  [[nodiscard]] const EncoderTopology& topology() const { return *topology_; }
  [[nodiscard]] int input_width() const { return input_width_; }
  [[nodiscard]] const std::string& prefix() const { return prefix_; }

  [[nodiscard]] int propagation_width(int level) const;  // output width of fp step into `level`

 private:
  std::string prefix_;
  EncoderConfig config_;
  int input_width_;
  std::shared_ptr<const EncoderTopology> topology_;
};

}  // namespace surfcloth::net
