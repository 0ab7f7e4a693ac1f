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

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace surfcloth {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Face = std::array<int, 3>;

/// Row-major dense matrix used for per-vertex and per-point feature arrays.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point on a triangle mesh addressed by face and barycentric weights.
/// `verts` repeats the face's vertex indices so the point can be evaluated
/// against any vertex array sharing the topology.
struct SurfacePoint {
  int face = 0;
  std::array<int, 3> verts{0, 0, 0};
  std::array<double, 3> bary{1.0, 0.0, 0.0};
};

/// Orthonormal tangent frame; columns are (tangent, bitangent, normal).
struct LocalFrame {
  Mat3 rotation = Mat3::Identity();
  Vec3 origin = Vec3::Zero();
};

struct PointCloud {
  std::vector<Vec3> positions;
  std::vector<Vec3> normals;  // empty or same length as positions

  [[nodiscard]] std::size_t size() const { return positions.size(); }
  [[nodiscard]] bool empty() const { return positions.empty(); }
  [[nodiscard]] bool has_normals() const { return !normals.empty(); }
};

struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::vector<Vec3> normals;  // per vertex; may be empty
};

}  // namespace surfcloth
