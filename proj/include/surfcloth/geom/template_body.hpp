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

#include <optional>
#include <string>
#include <vector>

#include "surfcloth/geom/types.hpp"

namespace surfcloth {

/// Joint hierarchy in rest pose. Offsets are relative to the parent joint;
/// the root offset is its absolute rest position. Parents precede children.
struct Skeleton {
  std::vector<std::string> names;
  std::vector<int> parents;  // -1 for the root
  std::vector<Vec3> offsets;

  [[nodiscard]] int joint_count() const { return static_cast<int>(parents.size()); }
  [[nodiscard]] std::vector<Vec3> rest_positions() const;
  void validate() const;
};

/// Per-face-corner texture coordinates. Corners of faces on either side of a
/// seam map the same surface point to different locations.
struct UvAtlas {
  std::vector<std::array<Vec2, 3>> face_uvs;
};

/// Rest-pose body: the constant domain of every surface feature.
struct TemplateBody {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::vector<Vec3> normals;
  Matrix skinning;  // N x J, rows sum to one
  Skeleton skeleton;
  std::optional<UvAtlas> atlas;

  [[nodiscard]] int vertex_count() const { return static_cast<int>(vertices.size()); }
  [[nodiscard]] int face_count() const { return static_cast<int>(faces.size()); }

  /// Checks index ranges, normal count and skinning row sums (tolerance on |sum - 1|).
  void validate(double skin_tolerance = 1e-9) const;
};

}  // namespace surfcloth
