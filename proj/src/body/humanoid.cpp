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

#include "surfcloth/body/humanoid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "surfcloth/geom/surface.hpp"
#include "surfcloth/geom/uv_atlas.hpp"

namespace surfcloth::body {

namespace {

using Quad = std::array<int, 4>;

struct QuadMesh {
  std::vector<Vec3> vertices;
  std::vector<Quad> quads;
};

struct KeyRing {
  double along = 0.0;  // coordinate on the extrusion axis
  Vec2 scale{1.0, 1.0};
};

struct Bone {
  Vec3 a;
  Vec3 b;
  double radius = 0.0;
};

constexpr double kRingSpacing = 0.2;  // segment length that receives rings_per_segment rings

// Replaces quad `face` by a tube through the key rings, capped at the end.
void extrude(QuadMesh& mesh, int face, int axis, const std::vector<KeyRing>& keys, int rings) {
  const Quad base = mesh.quads[face];
  Vec3 center = Vec3::Zero();
  for (int v : base) center += mesh.vertices[v];
  center /= 4.0;
  const int u_axis = axis == 0 ? 1 : 0;
  const int v_axis = axis == 2 ? 1 : 2;

  std::array<Vec3, 4> rel;
  for (int c = 0; c < 4; ++c) rel[c] = mesh.vertices[base[c]] - center;

  Quad prev = base;
  double prev_along = center[axis];
  Vec2 prev_scale(1.0, 1.0);
  std::vector<Quad> added;
  for (const KeyRing& key : keys) {
    const double len = std::abs(key.along - prev_along);
    const int count = std::max(1, static_cast<int>(std::lround(rings * len / kRingSpacing)));
    for (int r = 1; r <= count; ++r) {
      const double t = static_cast<double>(r) / count;
      const double along = prev_along + t * (key.along - prev_along);
      const Vec2 scale = prev_scale + t * (key.scale - prev_scale);
      Quad ring{};
      for (int c = 0; c < 4; ++c) {
        Vec3 p = center;
        p[axis] = along;
        p[u_axis] += scale.x() * rel[c][u_axis];
        p[v_axis] += scale.y() * rel[c][v_axis];
        ring[c] = static_cast<int>(mesh.vertices.size());
        mesh.vertices.push_back(p);
      }
      for (int c = 0; c < 4; ++c) {
        const int n = (c + 1) % 4;
        added.push_back({prev[c], prev[n], ring[n], ring[c]});
      }
      prev = ring;
    }
    prev_along = key.along;
    prev_scale = key.scale;
  }
  mesh.quads[face] = prev;  // end cap keeps the base orientation
  mesh.quads.insert(mesh.quads.end(), added.begin(), added.end());
}

QuadMesh catmull_clark(const QuadMesh& in) {
  const int nv = static_cast<int>(in.vertices.size());
  const int nf = static_cast<int>(in.quads.size());
  std::map<std::pair<int, int>, int> edge_id;
  std::vector<std::array<int, 2>> edge_verts;
  std::vector<std::vector<int>> edge_faces;
  for (int f = 0; f < nf; ++f) {
    for (int c = 0; c < 4; ++c) {
      const int a = in.quads[f][c];
      const int b = in.quads[f][(c + 1) % 4];
      const auto key = std::make_pair(std::min(a, b), std::max(a, b));
      auto [it, inserted] = edge_id.emplace(key, static_cast<int>(edge_verts.size()));
      if (inserted) {
        edge_verts.push_back({key.first, key.second});
        edge_faces.emplace_back();
      }
      edge_faces[it->second].push_back(f);
    }
  }
  const int ne = static_cast<int>(edge_verts.size());

  std::vector<Vec3> face_pt(nf);
  for (int f = 0; f < nf; ++f) {
    Vec3 s = Vec3::Zero();
    for (int v : in.quads[f]) s += in.vertices[v];
    face_pt[f] = s / 4.0;
  }
  std::vector<Vec3> edge_pt(ne);
  std::vector<Vec3> edge_mid(ne);
  for (int e = 0; e < ne; ++e) {
    const Vec3 a = in.vertices[edge_verts[e][0]];
    const Vec3 b = in.vertices[edge_verts[e][1]];
    edge_mid[e] = 0.5 * (a + b);
    if (edge_faces[e].size() != 2) throw Error("humanoid base mesh is not closed");
    edge_pt[e] = 0.25 * (a + b + face_pt[edge_faces[e][0]] + face_pt[edge_faces[e][1]]);
  }
  std::vector<Vec3> f_sum(nv, Vec3::Zero());
  std::vector<Vec3> r_sum(nv, Vec3::Zero());
  std::vector<int> valence(nv, 0);
  std::vector<int> face_count(nv, 0);
  for (int f = 0; f < nf; ++f) {
    for (int v : in.quads[f]) {
      f_sum[v] += face_pt[f];
      ++face_count[v];
    }
  }
  for (int e = 0; e < ne; ++e) {
    for (int v : edge_verts[e]) {
      r_sum[v] += edge_mid[e];
      ++valence[v];
    }
  }

  QuadMesh out;
  out.vertices.resize(nv + ne + nf);
  for (int v = 0; v < nv; ++v) {
    const double n = valence[v];
    const Vec3 favg = f_sum[v] / face_count[v];
    const Vec3 ravg = r_sum[v] / n;
    out.vertices[v] = (favg + 2.0 * ravg + (n - 3.0) * in.vertices[v]) / n;
  }
  for (int e = 0; e < ne; ++e) out.vertices[nv + e] = edge_pt[e];
  for (int f = 0; f < nf; ++f) out.vertices[nv + ne + f] = face_pt[f];

  out.quads.reserve(4 * nf);
  for (int f = 0; f < nf; ++f) {
    const Quad& q = in.quads[f];
    auto edge_of = [&](int a, int b) {
      return nv + edge_id.at({std::min(a, b), std::max(a, b)});
    };
    for (int c = 0; c < 4; ++c) {
      const int prev = q[(c + 3) % 4];
      const int next = q[(c + 1) % 4];
      out.quads.push_back({q[c], edge_of(q[c], next), nv + ne + f, edge_of(prev, q[c])});
    }
  }
  return out;
}

double segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

}  // namespace

void HumanoidConfig::validate() const {
  if (subdivisions < 0 || subdivisions > 3) throw Error("subdivisions must be in [0, 3]");
  if (rings_per_segment < 1 || rings_per_segment > 16) {
    throw Error("rings_per_segment must be in [1, 16]");
  }
  if (!(height_scale >= 0.5 && height_scale <= 2.0)) throw Error("height_scale must be in [0.5, 2]");
  if (!(girth_scale >= 0.5 && girth_scale <= 2.0)) throw Error("girth_scale must be in [0.5, 2]");
  if (!(skin_falloff > 0.0 && skin_falloff <= 0.5)) throw Error("skin_falloff must be in (0, 0.5]");
}

TemplateBody build_humanoid(const HumanoidConfig& config) {
  config.validate();
  const double g = config.girth_scale;

  // torso block: lattice 4 x 5 x 2 whose boundary quads face outward
  const std::array<double, 4> xs{-0.17 * g, -0.06 * g, 0.06 * g, 0.17 * g};
  const std::array<double, 5> ys{0.90, 1.02, 1.12, 1.22, 1.45};
  const std::array<double, 2> zs{-0.10 * g, 0.10 * g};
  QuadMesh mesh;
  constexpr int kTop = 4;
  auto vid = [](int i, int j, int k) { return (i * 5 + j) * 2 + k; };
  mesh.vertices.resize(40);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j <= kTop; ++j)
      for (int k = 0; k < 2; ++k) mesh.vertices[vid(i, j, k)] = Vec3(xs[i], ys[j], zs[k]);

  std::map<std::string, int> named;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < kTop; ++j) {
      mesh.quads.push_back({vid(i, j, 1), vid(i + 1, j, 1), vid(i + 1, j + 1, 1), vid(i, j + 1, 1)});
      mesh.quads.push_back({vid(i, j, 0), vid(i, j + 1, 0), vid(i + 1, j + 1, 0), vid(i + 1, j, 0)});
    }
    mesh.quads.push_back({vid(i, kTop, 0), vid(i, kTop, 1), vid(i + 1, kTop, 1), vid(i + 1, kTop, 0)});
    if (i == 1) named["neck"] = static_cast<int>(mesh.quads.size()) - 1;
    mesh.quads.push_back({vid(i, 0, 0), vid(i + 1, 0, 0), vid(i + 1, 0, 1), vid(i, 0, 1)});
    if (i == 0) named["right_leg"] = static_cast<int>(mesh.quads.size()) - 1;
    if (i == 2) named["left_leg"] = static_cast<int>(mesh.quads.size()) - 1;
  }
  for (int j = 0; j < kTop; ++j) {
    mesh.quads.push_back({vid(3, j, 0), vid(3, j + 1, 0), vid(3, j + 1, 1), vid(3, j, 1)});
    if (j == kTop - 1) named["left_arm"] = static_cast<int>(mesh.quads.size()) - 1;
    mesh.quads.push_back({vid(0, j, 0), vid(0, j, 1), vid(0, j + 1, 1), vid(0, j + 1, 0)});
    if (j == kTop - 1) named["right_arm"] = static_cast<int>(mesh.quads.size()) - 1;
  }

  const int rings = config.rings_per_segment;
  for (double side : {1.0, -1.0}) {
    const std::vector<KeyRing> arm{{side * 0.24 * g, {0.50, 0.55}},
                                   {side * 0.46, {0.42, 0.48}},
                                   {side * 0.70, {0.33, 0.38}},
                                   {side * 0.80, {0.40, 0.22}},
                                   {side * 0.86, {0.25, 0.15}}};
    extrude(mesh, named[side > 0 ? "left_arm" : "right_arm"], 0, arm, rings);
    const std::vector<KeyRing> leg{{0.82, {1.00, 0.75}},
                                   {0.50, {0.85, 0.60}},
                                   {0.10, {0.62, 0.45}},
                                   {0.04, {0.70, 0.70}},
                                   {0.00, {0.45, 0.45}}};
    extrude(mesh, named[side > 0 ? "left_leg" : "right_leg"], 1, leg, rings);
  }
  const std::vector<KeyRing> head{{1.52, {0.75, 0.50}},
                                  {1.57, {1.25, 0.85}},
                                  {1.66, {1.35, 0.95}},
                                  {1.76, {1.15, 0.85}},
                                  {1.81, {0.50, 0.45}}};
  extrude(mesh, named["neck"], 1, head, rings);

  for (int s = 0; s < config.subdivisions; ++s) mesh = catmull_clark(mesh);

  TemplateBody body;
  const double h = config.height_scale;
  body.vertices.reserve(mesh.vertices.size());
  for (const Vec3& v : mesh.vertices) body.vertices.push_back(h * v);
  body.faces.reserve(2 * mesh.quads.size());
  for (const Quad& q : mesh.quads) {
    body.faces.push_back({q[0], q[1], q[2]});
    body.faces.push_back({q[0], q[2], q[3]});
  }
  body.normals = vertex_normals(body.vertices, body.faces);

  // skeleton
  Skeleton& sk = body.skeleton;
  struct JointDef {
    const char* name;
    int parent;
    Vec3 rest;
    Vec3 bone_end;
    double radius;
  };
  const double sx = 0.17 * g;
  const std::vector<JointDef> defs{
      {"pelvis", -1, {0, 0.95, 0}, {0, 1.10, 0}, 0.14 * g},
      {"spine", 0, {0, 1.10, 0}, {0, 1.28, 0}, 0.14 * g},
      {"chest", 1, {0, 1.28, 0}, {0, 1.46, 0}, 0.14 * g},
      {"neck", 2, {0, 1.46, 0}, {0, 1.82, 0}, 0.06 * g},
      {"l_shoulder", 2, {sx, 1.335, 0}, {0.46, 1.335, 0}, 0.055 * g},
      {"l_elbow", 4, {0.46, 1.335, 0}, {0.70, 1.335, 0}, 0.045 * g},
      {"l_wrist", 5, {0.70, 1.335, 0}, {0.86, 1.335, 0}, 0.035 * g},
      {"r_shoulder", 2, {-sx, 1.335, 0}, {-0.46, 1.335, 0}, 0.055 * g},
      {"r_elbow", 7, {-0.46, 1.335, 0}, {-0.70, 1.335, 0}, 0.045 * g},
      {"r_wrist", 8, {-0.70, 1.335, 0}, {-0.86, 1.335, 0}, 0.035 * g},
      {"l_hip", 0, {0.115 * g, 0.90, 0}, {0.115 * g, 0.50, 0}, 0.07 * g},
      {"l_knee", 10, {0.115 * g, 0.50, 0}, {0.115 * g, 0.10, 0}, 0.05 * g},
      {"l_ankle", 11, {0.115 * g, 0.10, 0}, {0.115 * g, 0.00, 0}, 0.04 * g},
      {"r_hip", 0, {-0.115 * g, 0.90, 0}, {-0.115 * g, 0.50, 0}, 0.07 * g},
      {"r_knee", 13, {-0.115 * g, 0.50, 0}, {-0.115 * g, 0.10, 0}, 0.05 * g},
      {"r_ankle", 14, {-0.115 * g, 0.10, 0}, {-0.115 * g, 0.00, 0}, 0.04 * g},
  };
  static_assert(kHumanoidJoints == 16);
  std::vector<Bone> bones;
  for (const JointDef& d : defs) {
    sk.names.emplace_back(d.name);
    sk.parents.push_back(d.parent);
    const Vec3 rest = h * d.rest;
    const Vec3 parent_rest = d.parent < 0 ? Vec3::Zero() : Vec3(h * defs[d.parent].rest);
    sk.offsets.push_back(rest - parent_rest);
    bones.push_back({rest, h * d.bone_end, h * d.radius});
  }

  // skinning: Gaussian falloff in distance beyond each bone's radius,
  // relative to the closest bone, small weights pruned
  const int n = body.vertex_count();
  const double sigma2 = std::pow(config.skin_falloff * h, 2);
  body.skinning = Matrix::Zero(n, kHumanoidJoints);
  for (int i = 0; i < n; ++i) {
    std::array<double, kHumanoidJoints> d{};
    double d_min = std::numeric_limits<double>::infinity();
    for (int j = 0; j < kHumanoidJoints; ++j) {
      d[j] = std::max(0.0, segment_distance(body.vertices[i], bones[j].a, bones[j].b) -
                               bones[j].radius);
      d_min = std::min(d_min, d[j]);
    }
    double sum = 0.0;
    for (int j = 0; j < kHumanoidJoints; ++j) {
      double w = std::exp(-(d[j] * d[j] - d_min * d_min) / sigma2);
      if (w < 1e-4) w = 0.0;
      body.skinning(i, j) = w;
      sum += w;
    }
    body.skinning.row(i) /= sum;
  }
  body.atlas = build_cube_atlas(body.vertices, body.faces);
  return body;
}

}  // namespace surfcloth::body
