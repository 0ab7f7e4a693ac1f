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

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "surfcloth/body/pose.hpp"
#include "surfcloth/geom/template_body.hpp"

namespace surfcloth::body {

// Skeleton and skinning document:
//   { "joints":  ["pelvis", ...],          J names
//     "parents": [-1, 0, ...],             J parent indices
//     "offsets": [[x, y, z], ...],         J rest offsets from the parent
//     "weights": [[w_0 ... w_J-1], ...] }  N rows, one per mesh vertex

/// Builds a body from an OBJ mesh and a skinning document. Rows whose sum is
/// within [0.99, 1.01] are renormalized; others are rejected by row index.
[[nodiscard]] TemplateBody load_rigged_mesh(const std::filesystem::path& mesh_file,
                                            const std::filesystem::path& skinning_file);

void save_rigged_mesh(const TemplateBody& body, const std::filesystem::path& mesh_file,
                      const std::filesystem::path& skinning_file);

[[nodiscard]] nlohmann::json skinning_to_json(const TemplateBody& body);

// Pose sequence document:
//   { "joints": J,
//     "frames": [ { "root_translation": [x, y, z],
//                   "axis_angle": [[ax, ay, az], ...] }, ... ] }
// Rotations compose parent to child.

[[nodiscard]] nlohmann::json pose_to_json(const Pose& pose);
[[nodiscard]] Pose pose_from_json(const nlohmann::json& frame);
[[nodiscard]] std::vector<Pose> read_pose_sequence(const std::filesystem::path& path);
void write_pose_sequence(const std::filesystem::path& path, const std::vector<Pose>& poses);

}  // namespace surfcloth::body
