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

#include "surfcloth/geom/surface.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "surfcloth/random.hpp"

namespace surfcloth {

namespace {

void check_face(std::span<const Face> faces, int face) {
  if (face < 0 || face >= static_cast<int>(faces.size())) {
    throw Error("face index " + std::to_string(face) + " out of range");
  }
}

void check_point(std::size_t vertex_count, const SurfacePoint& sp) {
  for (int v : sp.verts) {
    if (v < 0 || static_cast<std::size_t>(v) >= vertex_count) {
      throw Error("surface point references vertex " + std::to_string(v) + " out of range");
    }
  }
}

}  // namespace

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

std::vector<Vec3> vertex_normals(std::span<const Vec3> vertices, std::span<const Face> faces) {
  std::vector<Vec3> acc(vertices.size(), Vec3::Zero());
  for (const Face& f : faces) {
    const Vec3 n = (vertices[f[1]] - vertices[f[0]]).cross(vertices[f[2]] - vertices[f[0]]);
    for (int v : f) acc[v] += n;
  }
  for (Vec3& n : acc) {
    const double len = n.norm();
    if (len > 0.0) n /= len;
  }
  return acc;
}

SurfacePoint make_surface_point(std::span<const Face> faces, int face, std::array<double, 3> bary) {
  check_face(faces, face);
  SurfacePoint sp;
  sp.face = face;
  sp.verts = faces[face];
  sp.bary = bary;
  return sp;
}

std::vector<SurfacePoint> sample_surface(std::span<const Vec3> vertices,
                                         std::span<const Face> faces, int count,
                                         std::uint64_t seed) {
  if (count < 1) throw Error("sample count must be at least 1");
  std::vector<double> cdf(faces.size());
  double total = 0.0;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    total += triangle_area(vertices[faces[f][0]], vertices[faces[f][1]], vertices[faces[f][2]]);
    cdf[f] = total;
  }
  if (!(total > 0.0)) throw Error("degenerate surface");

  Rng rng(seed);
  std::vector<SurfacePoint> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double pick = rng.uniform() * total;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), pick);
    auto face = static_cast<int>(std::min<std::ptrdiff_t>(it - cdf.begin(), cdf.size() - 1));
    const double s = std::sqrt(rng.uniform());
    const double t = rng.uniform();
    const double b1 = s * (1.0 - t);
    const double b2 = s * t;
    out.push_back(make_surface_point(faces, face, {1.0 - b1 - b2, b1, b2}));
  }
  return out;
}

Vec3 position_at(std::span<const Vec3> vertices, const SurfacePoint& sp) {
  check_point(vertices.size(), sp);
  return sp.bary[0] * vertices[sp.verts[0]] + sp.bary[1] * vertices[sp.verts[1]] +
         sp.bary[2] * vertices[sp.verts[2]];
}

Eigen::VectorXd interpolate_feature(const Matrix& field, const SurfacePoint& sp) {
  check_point(static_cast<std::size_t>(field.rows()), sp);
  Eigen::VectorXd out = sp.bary[0] * field.row(sp.verts[0]).transpose();
  out += sp.bary[1] * field.row(sp.verts[1]).transpose();
  out += sp.bary[2] * field.row(sp.verts[2]).transpose();
  return out;
}

Eigen::VectorXd interpolate_feature(std::span<const Eigen::VectorXd> field, const SurfacePoint& sp) {
  check_point(field.size(), sp);
  const auto& f0 = field[sp.verts[0]];
  const auto& f1 = field[sp.verts[1]];
  const auto& f2 = field[sp.verts[2]];
  if (f0.size() != f1.size() || f0.size() != f2.size()) {
    throw Error("feature dimension mismatch on face " + std::to_string(sp.face));
  }
  Eigen::VectorXd out = sp.bary[0] * f0;
  out += sp.bary[1] * f1;
  out += sp.bary[2] * f2;
  return out;
}

LocalFrame local_frame(std::span<const Vec3> vertices, std::span<const Vec3> normals,
                       const SurfacePoint& sp) {
  check_point(vertices.size(), sp);
  check_point(normals.size(), sp);
  constexpr double kEps = 1e-12;
  Vec3 n = sp.bary[0] * normals[sp.verts[0]] + sp.bary[1] * normals[sp.verts[1]] +
           sp.bary[2] * normals[sp.verts[2]];
  const double n_len = n.norm();
  if (!(n_len > kEps)) throw Error("degenerate frame");
  n /= n_len;
  Vec3 t = vertices[sp.verts[1]] - vertices[sp.verts[0]];
  t -= t.dot(n) * n;
  const double t_len = t.norm();
  if (!(t_len > kEps)) throw Error("degenerate frame");
  t /= t_len;
  LocalFrame frame;
  frame.rotation.col(0) = t;
  frame.rotation.col(1) = n.cross(t);
  frame.rotation.col(2) = n;
  frame.origin = position_at(vertices, sp);
  return frame;
}

LocalFrame local_frame(std::span<const Vec3> vertices, std::span<const Face> faces,
                       const SurfacePoint& sp) {
  const auto normals = vertex_normals(vertices, faces);
  return local_frame(vertices, normals, sp);
}

std::vector<SharedEdge> shared_edges(std::span<const Face> faces) {
  std::map<std::pair<int, int>, std::vector<int>> uses;
  for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
    for (int c = 0; c < 3; ++c) {
      const int a = faces[f][c];
      const int b = faces[f][(c + 1) % 3];
      uses[{std::min(a, b), std::max(a, b)}].push_back(f);
    }
  }
  std::vector<SharedEdge> out;
  for (const auto& [edge, fs] : uses) {
    if (fs.size() == 2) out.push_back({edge.first, edge.second, fs[0], fs[1]});
  }
  return out;
}

SurfacePoint edge_point(std::span<const Face> faces, int face, int v0, int v1, double t) {
  check_face(faces, face);
  std::array<double, 3> bary{0.0, 0.0, 0.0};
  bool found0 = false;
  bool found1 = false;
  for (int c = 0; c < 3; ++c) {
    if (faces[face][c] == v0) {
      bary[c] = 1.0 - t;
      found0 = true;
    } else if (faces[face][c] == v1) {
      bary[c] = t;
      found1 = true;
    }
  }
  if (!found0 || !found1) throw Error("edge is not part of face " + std::to_string(face));
  return make_surface_point(faces, face, bary);
}

bool is_closed_manifold(std::span<const Face> faces, int vertex_count) {
  std::map<std::pair<int, int>, int> directed;
  for (const Face& f : faces) {
    for (int c = 0; c < 3; ++c) {
      const int a = f[c];
      const int b = f[(c + 1) % 3];
      if (a < 0 || b < 0 || a >= vertex_count || b >= vertex_count || a == b) return false;
      if (++directed[{a, b}] > 1) return false;
    }
  }
  for (const auto& [edge, n] : directed) {
    if (directed.find({edge.second, edge.first}) == directed.end()) return false;
  }
  return true;
}

}  // namespace surfcloth
