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

#include "surfcloth/geom/uv_atlas.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "surfcloth/geom/surface.hpp"

namespace surfcloth {

UvAtlas build_cube_atlas(std::span<const Vec3> vertices, std::span<const Face> faces) {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const Vec3& v : vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  const Vec3 extent = (hi - lo).cwiseMax(Vec3::Constant(1e-12));
  // islands laid out 3 x 2: (+x, +y, +z) on the bottom row, (-x, -y, -z) on top
  constexpr double kCellW = 1.0 / 3.0;
  constexpr double kCellH = 0.5;
  constexpr double kMargin = 0.04;

  UvAtlas atlas;
  atlas.face_uvs.resize(faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const Vec3& a = vertices[faces[f][0]];
    const Vec3& b = vertices[faces[f][1]];
    const Vec3& c = vertices[faces[f][2]];
    const Vec3 n = (b - a).cross(c - a);
    Eigen::Index axis = 0;
    n.cwiseAbs().maxCoeff(&axis);
    const bool negative = n[axis] < 0.0;
    const int u_axis = static_cast<int>((axis + 1) % 3);
    const int v_axis = static_cast<int>((axis + 2) % 3);
    const double cell_u = kCellW * static_cast<double>(axis);
    const double cell_v = negative ? kCellH : 0.0;
    for (int corner = 0; corner < 3; ++corner) {
      const Vec3& p = vertices[faces[f][corner]];
      double s = (p[u_axis] - lo[u_axis]) / extent[u_axis];
      const double t = (p[v_axis] - lo[v_axis]) / extent[v_axis];
      if (negative) s = 1.0 - s;  // mirror so back-facing islands are not flipped
      atlas.face_uvs[f][corner] = Vec2(cell_u + kCellW * (kMargin + (1.0 - 2.0 * kMargin) * s),
                                       cell_v + kCellH * (kMargin + (1.0 - 2.0 * kMargin) * t));
    }
  }
  return atlas;
}

Vec2 uv_at(const UvAtlas& atlas, const SurfacePoint& sp) {
  if (sp.face < 0 || static_cast<std::size_t>(sp.face) >= atlas.face_uvs.size()) {
    throw Error("surface point face outside the uv atlas");
  }
  const auto& uv = atlas.face_uvs[sp.face];
  return sp.bary[0] * uv[0] + sp.bary[1] * uv[1] + sp.bary[2] * uv[2];
}

BilinearTap bilinear_tap(int width, int height, const Vec2& uv) {
  if (width < 1 || height < 1) throw Error("feature grid is empty");
  if (!(uv.x() >= 0.0 && uv.x() <= 1.0 && uv.y() >= 0.0 && uv.y() <= 1.0)) {
    throw Error("uv coordinate outside the atlas");
  }
  const double x = uv.x() * width - 0.5;
  const double y = uv.y() * height - 0.5;
  const double fx0 = std::floor(x);
  const double fy0 = std::floor(y);
  const double ax = x - fx0;
  const double ay = y - fy0;
  const int x0 = std::clamp(static_cast<int>(fx0), 0, width - 1);
  const int x1 = std::clamp(static_cast<int>(fx0) + 1, 0, width - 1);
  const int y0 = std::clamp(static_cast<int>(fy0), 0, height - 1);
  const int y1 = std::clamp(static_cast<int>(fy0) + 1, 0, height - 1);
  BilinearTap tap;
  tap.texel = {y0 * width + x0, y0 * width + x1, y1 * width + x0, y1 * width + x1};
  tap.weight = {(1.0 - ax) * (1.0 - ay), ax * (1.0 - ay), (1.0 - ax) * ay, ax * ay};
  return tap;
}

Eigen::VectorXd bilinear_sample(const FeatureGrid& grid, const Vec2& uv) {
  if (grid.values.rows() != static_cast<Eigen::Index>(grid.width) * grid.height) {
    throw Error("feature grid size does not match its dimensions");
  }
  const BilinearTap tap = bilinear_tap(grid.width, grid.height, uv);
  Eigen::VectorXd out = tap.weight[0] * grid.values.row(tap.texel[0]).transpose();
  for (int k = 1; k < 4; ++k) out += tap.weight[k] * grid.values.row(tap.texel[k]).transpose();
  return out;
}

UvRaster rasterize_atlas(const UvAtlas& atlas, std::span<const Face> faces, int width, int height) {
  if (width < 1 || height < 1) throw Error("raster size must be positive");
  if (atlas.face_uvs.size() != faces.size()) throw Error("atlas does not match the mesh faces");
  UvRaster r;
  r.width = width;
  r.height = height;
  r.texels.resize(static_cast<std::size_t>(width) * height);
  r.covered.assign(r.texels.size(), false);
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto& t = atlas.face_uvs[f];
    const Vec2 e1 = t[1] - t[0];
    const Vec2 e2 = t[2] - t[0];
    const double det = e1.x() * e2.y() - e1.y() * e2.x();
    if (std::abs(det) < 1e-300) continue;
    const Vec2 lo = t[0].cwiseMin(t[1]).cwiseMin(t[2]);
    const Vec2 hi = t[0].cwiseMax(t[1]).cwiseMax(t[2]);
    const int i0 = std::max(0, static_cast<int>(std::floor(lo.x() * width - 0.5)));
    const int i1 = std::min(width - 1, static_cast<int>(std::ceil(hi.x() * width - 0.5)));
    const int j0 = std::max(0, static_cast<int>(std::floor(lo.y() * height - 0.5)));
    const int j1 = std::min(height - 1, static_cast<int>(std::ceil(hi.y() * height - 0.5)));
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) {
        const std::size_t idx = static_cast<std::size_t>(j) * width + i;
        if (r.covered[idx]) continue;
        const Vec2 q = Vec2((i + 0.5) / width, (j + 0.5) / height) - t[0];
        const double b1 = (q.x() * e2.y() - q.y() * e2.x()) / det;
        const double b2 = (e1.x() * q.y() - e1.y() * q.x()) / det;
        const double b0 = 1.0 - b1 - b2;
        if (b0 < 0.0 || b1 < 0.0 || b2 < 0.0) continue;
        r.texels[idx] = make_surface_point(faces, static_cast<int>(f), {b0, b1, b2});
        r.covered[idx] = true;
      }
    }
  }
  std::deque<int> queue;
  std::vector<bool> done = r.covered;
  for (std::size_t i = 0; i < done.size(); ++i) {
    if (done[i]) queue.push_back(static_cast<int>(i));
  }
  if (queue.empty()) throw Error("uv atlas covers no texel of the raster");
  while (!queue.empty()) {
    const int idx = queue.front();
    queue.pop_front();
    const int i = idx % width;
    const int j = idx / width;
    const std::array<std::pair<int, int>, 4> nbrs{{{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}}};
    for (const auto& [ni, nj] : nbrs) {
      if (ni < 0 || nj < 0 || ni >= width || nj >= height) continue;
      const int n = nj * width + ni;
      if (done[n]) continue;
      done[n] = true;
      r.texels[n] = r.texels[idx];
      queue.push_back(n);
    }
  }
  return r;
}

FeatureGrid rasterize_features(const UvRaster& raster, const Matrix& vertex_features) {
  FeatureGrid g;
  g.width = raster.width;
  g.height = raster.height;
  g.values.resize(static_cast<Eigen::Index>(raster.texels.size()), vertex_features.cols());
  for (std::size_t t = 0; t < raster.texels.size(); ++t) {
    g.values.row(static_cast<Eigen::Index>(t)) = interpolate_feature(vertex_features, raster.texels[t]).transpose();
  }
  return g;
}

}  // namespace surfcloth
