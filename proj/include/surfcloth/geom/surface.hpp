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
#include <span>
#include <utility>
#include <vector>

#include "surfcloth/geom/types.hpp"

namespace surfcloth {

[[nodiscard]] double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);

/// Area-weighted vertex normals, unit length. Vertices without incident area
/// get a zero normal.
[[nodiscard]] std::vector<Vec3> vertex_normals(std::span<const Vec3> vertices,
                                               std::span<const Face> faces);

[[nodiscard]] SurfacePoint make_surface_point(std::span<const Face> faces, int face,
                                              std::array<double, 3> bary);

/// Area-uniform samples on the mesh. Deterministic for a given seed.
/// Throws "degenerate surface" when the total area is zero.
[[nodiscard]] std::vector<SurfacePoint> sample_surface(std::span<const Vec3> vertices,
                                                       std::span<const Face> faces, int count,
                                                       std::uint64_t seed);

[[nodiscard]] Vec3 position_at(std::span<const Vec3> vertices, const SurfacePoint& sp);

/// Barycentric interpolation of per-vertex features stored as rows.
[[nodiscard]] Eigen::VectorXd interpolate_feature(const Matrix& field, const SurfacePoint& sp);

/// Same, for fields stored as separate vectors; the three vertex features of
/// the face must agree in dimension.
[[nodiscard]] Eigen::VectorXd interpolate_feature(std::span<const Eigen::VectorXd> field,
                                                  const SurfacePoint& sp);

/// Tangent frame at a surface point of a posed mesh: normal from the
/// interpolated vertex normals, tangent from the first face edge.
[[nodiscard]] LocalFrame local_frame(std::span<const Vec3> vertices,
                                     std::span<const Vec3> vertex_normals, const SurfacePoint& sp);

[[nodiscard]] LocalFrame local_frame(std::span<const Vec3> vertices, std::span<const Face> faces,
                                     const SurfacePoint& sp);

/// An edge shared by exactly two faces; v0 < v1.
struct SharedEdge {
  int v0 = 0;
  int v1 = 0;
  int face_a = 0;
  int face_b = 0;
};

[[nodiscard]] std::vector<SharedEdge> shared_edges(std::span<const Face> faces);

/// Surface point at parameter t along (v0 -> v1) expressed through `face`.
[[nodiscard]] SurfacePoint edge_point(std::span<const Face> faces, int face, int v0, int v1,
                                      double t);

/// Closed two-manifold check: every undirected edge is used by exactly two
/// faces with opposite orientation.
[[nodiscard]] bool is_closed_manifold(std::span<const Face> faces, int vertex_count);

}  // namespace surfcloth
