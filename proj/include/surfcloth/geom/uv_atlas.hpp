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

#include "surfcloth/geom/template_body.hpp"
#include "surfcloth/geom/types.hpp"

namespace surfcloth {

/// Cube-map atlas: each face goes to one of six islands chosen by the
/// dominant axis of its normal and is projected orthographically onto that
/// island. Edges between faces of different islands are seams.
[[nodiscard]] UvAtlas build_cube_atlas(std::span<const Vec3> vertices, std::span<const Face> faces);

/// Texture coordinate of a surface point through its own face.
[[nodiscard]] Vec2 uv_at(const UvAtlas& atlas, const SurfacePoint& sp);

/// Row-major feature grid over [0,1]^2 with texel centers at ((i + 0.5) / width,
/// (j + 0.5) / height). Row index is j * width + i.
struct FeatureGrid {
  int width = 0;
  int height = 0;
  Matrix values;  // (width * height) x C
};

/// Bilinear weights of the four texels around uv; coordinates outside the
/// texel-center lattice are clamped to the border. Throws when uv lies
/// outside [0,1]^2.
struct BilinearTap {
  std::array<int, 4> texel{};
  std::array<double, 4> weight{};
};
[[nodiscard]] BilinearTap bilinear_tap(int width, int height, const Vec2& uv);

[[nodiscard]] Eigen::VectorXd bilinear_sample(const FeatureGrid& grid, const Vec2& uv);

/// Surface point seen by every texel center of a grid laid over the atlas.
/// Texels covered by a face take the first covering face in face order;
/// uncovered texels copy the nearest covered texel (breadth-first over the
/// 4-neighborhood), so every texel maps somewhere on the surface.
struct UvRaster {
  int width = 0;
  int height = 0;
  std::vector<SurfacePoint> texels;  // row index j * width + i
  std::vector<bool> covered;
};

[[nodiscard]] UvRaster rasterize_atlas(const UvAtlas& atlas, std::span<const Face> faces, int width,
                                       int height);

/// Grid holding the barycentric interpolation of per-vertex features at
/// every texel of the raster.
[[nodiscard]] FeatureGrid rasterize_features(const UvRaster& raster, const Matrix& vertex_features);

}  // namespace surfcloth
