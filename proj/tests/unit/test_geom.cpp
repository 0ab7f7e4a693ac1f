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

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>

#include "helpers.hpp"
#include "surfcloth/body/humanoid.hpp"
#include "surfcloth/geom/io.hpp"
#include "surfcloth/geom/kernels.hpp"
#include "surfcloth/geom/surface.hpp"
#include "surfcloth/geom/uv_atlas.hpp"

namespace surfcloth {
namespace {

using testing::random_points;
using testing::random_rotation;
using testing::TempDir;

const std::vector<Vec3> kTri{{0, 0, 0}, {3, 0, 0}, {0, 3, 0}};
const std::vector<Face> kTriFaces{{0, 1, 2}};

// ---- sampling and interpolation ------------------------------------------

TEST(SampleSurface, PointsOnSingleTriangleArePartitionsOfUnity) {
  const auto pts = sample_surface(kTri, kTriFaces, 3, 11);
  ASSERT_EQ(pts.size(), 3u);
  for (const auto& sp : pts) {
    EXPECT_EQ(sp.face, 0);
    EXPECT_NEAR(sp.bary[0] + sp.bary[1] + sp.bary[2], 1.0, 1e-12);
    for (double b : sp.bary) {
      EXPECT_GE(b, 0.0);
      EXPECT_LE(b, 1.0);
    }
  }
}

TEST(SampleSurface, AreaProportionalCounts) {
  // triangle 0 has area 4.5, triangle 1 has area 0.5
  const std::vector<Vec3> v{{0, 0, 0}, {3, 0, 0}, {0, 3, 0}, {10, 0, 0}, {11, 0, 0}, {10, 1, 0}};
  const std::vector<Face> f{{0, 1, 2}, {3, 4, 5}};
  const auto pts = sample_surface(v, f, 10000, 5);
  const auto big = std::count_if(pts.begin(), pts.end(), [](const SurfacePoint& p) { return p.face == 0; });
  EXPECT_NEAR(static_cast<double>(big), 9000.0, 300.0);
}

TEST(SampleSurface, DeterministicPerSeed) {
  const auto body = body::build_humanoid();
  const auto a = sample_surface(body.vertices, body.faces, 500, 42);
  const auto b = sample_surface(body.vertices, body.faces, 500, 42);
  const auto c = sample_surface(body.vertices, body.faces, 500, 43);
  ASSERT_EQ(a.size(), b.size());
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].face, b[i].face);
    EXPECT_EQ(a[i].bary, b[i].bary);
    differs = differs || a[i].bary != c[i].bary;
  }
  EXPECT_TRUE(differs);
}

TEST(SampleSurface, DegenerateMeshRejected) {
  const std::vector<Vec3> v{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
  try {
    (void)sample_surface(v, kTriFaces, 3, 0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("degenerate surface"), std::string::npos);
  }
  EXPECT_THROW((void)sample_surface(kTri, kTriFaces, 0, 0), Error);
}

TEST(PositionAt, VertexCentroidAndWeightedSum) {
  const SurfacePoint vtx = make_surface_point(kTriFaces, 0, {1, 0, 0});
  EXPECT_EQ(position_at(kTri, vtx), Vec3(0, 0, 0));
  const SurfacePoint centroid = make_surface_point(kTriFaces, 0, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  EXPECT_TRUE(position_at(kTri, centroid).isApprox(Vec3(1, 1, 0), 1e-15));
  // 0.5 * (0,0,0) + 0.25 * (3,0,0) + 0.25 * (0,3,0)
  const SurfacePoint sp = make_surface_point(kTriFaces, 0, {0.5, 0.25, 0.25});
  EXPECT_EQ(position_at(kTri, sp), Vec3(0.75, 0.75, 0.0));
}

TEST(InterpolateFeature, VertexAndWeightedCases) {
  Matrix field(3, 2);
  field << 1, 0, 0, 1, 0, 0;
  const auto at_v1 = interpolate_feature(field, make_surface_point(kTriFaces, 0, {0, 1, 0}));
  EXPECT_EQ(at_v1, Eigen::Vector2d(0, 1));
  const auto mixed = interpolate_feature(field, make_surface_point(kTriFaces, 0, {0.5, 0.25, 0.25}));
  EXPECT_EQ(mixed, Eigen::Vector2d(0.5, 0.25));
}

TEST(InterpolateFeature, DimensionMismatchRejected) {
  std::vector<Eigen::VectorXd> field{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(2)};
  EXPECT_THROW((void)interpolate_feature(field, make_surface_point(kTriFaces, 0, {0.2, 0.3, 0.5})), Error);
}

TEST(InterpolateFeature, ConstantFieldIsReproduced) {
  const auto body = body::build_humanoid();
  Matrix field(body.vertex_count(), 4);
  field.rowwise() = Eigen::RowVector4d(0.3, -1.7, 2.25, 1e-3);
  for (const auto& sp : sample_surface(body.vertices, body.faces, 1000, 9)) {
    const Eigen::VectorXd f = interpolate_feature(field, sp);
    for (int c = 0; c < 4; ++c) EXPECT_NEAR(f[c], field(0, c), 1e-12);
  }
}

TEST(InterpolateFeature, SharedEdgeAgreesThroughBothFaces) {
  const auto body = body::build_humanoid();
  Matrix field(body.vertex_count(), 3);
  Rng rng(3);
  for (Eigen::Index i = 0; i < field.size(); ++i) field.data()[i] = rng.normal();
  const auto edges = shared_edges(body.faces);
  ASSERT_FALSE(edges.empty());
  for (int s = 0; s < 1000; ++s) {
    const auto& e = edges[rng.below(edges.size())];
    const double t = rng.uniform();
    const auto a = edge_point(body.faces, e.face_a, e.v0, e.v1, t);
    const auto b = edge_point(body.faces, e.face_b, e.v0, e.v1, t);
    EXPECT_LE((interpolate_feature(field, a) - interpolate_feature(field, b)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

// ---- local frames --------------------------------------------------------

TEST(LocalFrame, PlanarTriangle) {
  const std::vector<Vec3> normals(3, Vec3::UnitZ());
  const auto f = local_frame(kTri, normals, make_surface_point(kTriFaces, 0, {0.2, 0.3, 0.5}));
  EXPECT_TRUE(f.rotation.col(2).isApprox(Vec3::UnitZ(), 1e-15));
  EXPECT_TRUE((f.rotation.transpose() * f.rotation).isApprox(Mat3::Identity(), 1e-12));
  EXPECT_NEAR(f.rotation.determinant(), 1.0, 1e-12);
  EXPECT_TRUE(f.origin.isApprox(Vec3(0.9, 1.5, 0.0), 1e-15));
}

TEST(LocalFrame, OrthonormalOnRandomConfigurations) {
  for (int trial = 0; trial < 50; ++trial) {
    const auto v = random_points(3, 100 + trial);
    const std::vector<Vec3> n = {random_points(1, 200 + trial)[0].normalized(),
                                 random_points(1, 300 + trial)[0].normalized(),
                                 random_points(1, 400 + trial)[0].normalized()};
    Rng rng(trial);
    const double a = rng.uniform(), b = rng.uniform() * (1 - a);
    SurfacePoint sp = make_surface_point(kTriFaces, 0, {a, b, 1 - a - b});
    const Vec3 interp = a * n[0] + b * n[1] + (1 - a - b) * n[2];
    if (interp.norm() < 1e-3) continue;
    const auto f = local_frame(v, n, sp);
    EXPECT_LE(((f.rotation.transpose() * f.rotation) - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_NEAR(f.rotation.determinant(), 1.0, 1e-9);
    EXPECT_TRUE(f.rotation.col(2).isApprox(interp.normalized(), 1e-12));
  }
}

TEST(LocalFrame, RigidEquivariance) {
  const auto body = body::build_humanoid();
  const Mat3 r = random_rotation(17);
  const Vec3 t(0.3, -1.2, 2.0);
  std::vector<Vec3> moved(body.vertices.size());
  for (std::size_t i = 0; i < moved.size(); ++i) moved[i] = r * body.vertices[i] + t;
  for (const auto& sp : sample_surface(body.vertices, body.faces, 200, 8)) {
    const auto a = local_frame(body.vertices, body.faces, sp);
    const auto b = local_frame(moved, body.faces, sp);
    EXPECT_LE((b.rotation - r * a.rotation).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE((b.origin - (r * a.origin + t)).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(LocalFrame, DegenerateFaceRejected) {
  const std::vector<Vec3> flat{{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  try {
    (void)local_frame(flat, kTriFaces, make_surface_point(kTriFaces, 0, {0.3, 0.3, 0.4}));
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("degenerate frame"), std::string::npos);
  }
}

// ---- farthest point sampling ---------------------------------------------

TEST(FarthestPointSample, CollinearTrace) {
  const std::vector<Vec3> p{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {9, 0, 0}};
  EXPECT_EQ(farthest_point_sample(p, 3), (std::vector<int>{0, 3, 2}));
}

TEST(FarthestPointSample, FullSampleIsPermutation) {
  const auto p = random_points(97, 4);
  auto idx = farthest_point_sample(p, 97);
  std::sort(idx.begin(), idx.end());
  std::vector<int> all(97);
  std::iota(all.begin(), all.end(), 0);
  EXPECT_EQ(idx, all);
}

TEST(FarthestPointSample, DuplicatePointsNeverRepicked) {
  std::vector<Vec3> p(10, Vec3(1, 2, 3));
  auto idx = farthest_point_sample(p, 10);
  EXPECT_EQ(std::set<int>(idx.begin(), idx.end()).size(), 10u);
}

TEST(FarthestPointSample, PrefixProperty) {
  const auto p = random_points(300, 5);
  const auto big = farthest_point_sample(p, 41);
  const auto small = farthest_point_sample(p, 40);
  EXPECT_TRUE(std::equal(small.begin(), small.end(), big.begin()));
}

TEST(FarthestPointSample, SerialAndParallelAgree) {
  const auto p = random_points(2000, 6);
  EXPECT_EQ(serial::farthest_point_sample(p, 300), parallel::farthest_point_sample(p, 300));
}

TEST(FarthestPointSample, RangeChecked) {
  const auto p = random_points(5, 6);
  EXPECT_THROW((void)farthest_point_sample(p, 0), Error);
  EXPECT_THROW((void)farthest_point_sample(p, 6), Error);
}

TEST(FpsCache, ReusesResult) {
  const auto p = random_points(500, 7);
  FpsCache cache;
  const auto& a = cache.get(p, 64);
  const auto& b = cache.get(p, 64);
  EXPECT_EQ(&a, &b);
  EXPECT_EQ(cache.misses(), 1u);
  EXPECT_EQ(a, farthest_point_sample(p, 64));
  (void)cache.get(p, 32);
  EXPECT_EQ(cache.misses(), 2u);
  EXPECT_EQ(a, farthest_point_sample(p, 64));  // reference still valid
}

// ---- nearest neighbor and chamfer ----------------------------------------

TEST(NearestNeighbor, SimpleCases) {
  PointCloud t;
  t.positions = {{1, 0, 0}, {0, 2, 0}};
  const auto n = nearest_neighbor(Vec3(0, 0, 0), t);
  EXPECT_EQ(n.index, 0);
  EXPECT_EQ(n.sq_distance, 1.0);
  const auto self = nearest_neighbor(Vec3(0, 2, 0), t);
  EXPECT_EQ(self.index, 1);
  EXPECT_EQ(self.sq_distance, 0.0);
  EXPECT_THROW((void)nearest_neighbor(Vec3::Zero(), PointCloud{}), Error);
}

TEST(NearestNeighbor, TieGoesToLowestIndex) {
  PointCloud t;
  t.positions = {{5, 5, 5}, {1, 0, 0}, {-1, 0, 0}, {1, 0, 0}};
  EXPECT_EQ(nearest_neighbor(Vec3::Zero(), t).index, 1);
  const KdTree tree(t.positions, 1);
  EXPECT_EQ(tree.nearest(Vec3::Zero()).index, 1);
}

TEST(NearestNeighbor, KdTreeMatchesBruteForce) {
  for (int n : {1, 2, 17, 500, 10000}) {
    const auto target = random_points(n, 1000 + n);
    const auto queries = random_points(300, 2000 + n, 1.3);
    const KdTree tree(target);
    const auto fast = parallel::nearest_neighbors(queries, tree);
    for (std::size_t q = 0; q < queries.size(); ++q) {
      const auto slow = serial::nearest_neighbor(queries[q], target);
      EXPECT_EQ(fast[q].index, slow.index);
      EXPECT_EQ(fast[q].sq_distance, slow.sq_distance);
    }
  }
}

TEST(NearestNeighbor, GridTiesMatchBruteForce) {
  std::vector<Vec3> grid;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      for (int k = 0; k < 6; ++k) grid.emplace_back(i, j, k);
  const KdTree tree(grid, 3);
  for (const Vec3& q : random_points(300, 8, 6.0)) {
    const Vec3 snapped = (q * 2).array().round().matrix() / 2;  // half-integer queries hit exact ties
    EXPECT_EQ(tree.nearest(snapped).index, serial::nearest_neighbor(snapped, grid).index);
    const auto fast = tree.knn(snapped, 8);
    const auto slow = serial::knn(snapped, grid, 8);
    for (int k = 0; k < 8; ++k) EXPECT_EQ(fast[k].index, slow[k].index);
  }
}

TEST(Chamfer, SpecExamples) {
  PointCloud a, b;
  a.positions = {{0, 0, 0}};
  b.positions = {{1, 0, 0}};
  EXPECT_EQ(chamfer(a, b), 2.0);
  a.positions = {{0, 0, 0}, {2, 0, 0}};
  // a->b: (1 + 1) / 2, b->a: 1
  EXPECT_EQ(chamfer(a, b), 2.0);
  EXPECT_EQ(chamfer(a, a), 0.0);
  EXPECT_THROW((void)chamfer(a, PointCloud{}), Error);
}

TEST(Chamfer, SymmetricNonNegativeAndMatchesBruteForce) {
  for (int trial = 0; trial < 20; ++trial) {
    PointCloud a, b;
    a.positions = random_points(50 + 37 * trial, 10 + trial);
    b.positions = random_points(80 + 11 * trial, 50 + trial);
    double ab = 0.0, ba = 0.0;
    for (const Vec3& p : a.positions) {
      double best = 1e300;
      for (const Vec3& q : b.positions) best = std::min(best, (p - q).squaredNorm());
      ab += best;
    }
    for (const Vec3& q : b.positions) {
      double best = 1e300;
      for (const Vec3& p : a.positions) best = std::min(best, (p - q).squaredNorm());
      ba += best;
    }
    const double oracle = ab / a.size() + ba / b.size();
    EXPECT_NEAR(chamfer(a, b), oracle, 1e-12);
    EXPECT_EQ(chamfer(a, b), chamfer(b, a));
    EXPECT_GE(chamfer(a, b), 0.0);
  }
}

TEST(Chamfer, SerialAndParallelBitIdentical) {
  const auto a = random_points(3000, 1);
  const auto b = random_points(2000, 2);
  const auto s = serial::chamfer_terms(a, b);
  const auto p = parallel::chamfer_terms(a, b);
  EXPECT_EQ(s.a_to_b, p.a_to_b);
  EXPECT_EQ(s.b_to_a, p.b_to_a);
  EXPECT_EQ(s.nn_a_in_b, p.nn_a_in_b);
  EXPECT_EQ(s.nn_b_in_a, p.nn_b_in_a);
}

// ---- mesh checks and IO --------------------------------------------------

TEST(Manifold, ClosedMeshDetection) {
  const std::vector<Face> tet{{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {0, 3, 2}};
  EXPECT_TRUE(is_closed_manifold(tet, 4));
  EXPECT_FALSE(is_closed_manifold(std::vector<Face>(tet.begin(), tet.end() - 1), 4));
}

TEST(ObjIo, RoundTripIsExact) {
  TempDir dir("obj");
  const auto body = body::build_humanoid();
  TriMesh mesh{body.vertices, body.faces, body.normals};
  write_obj(dir / "m.obj", mesh);
  const TriMesh back = read_obj(dir / "m.obj");
  ASSERT_EQ(back.vertices.size(), mesh.vertices.size());
  EXPECT_EQ(back.faces, mesh.faces);
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    EXPECT_EQ(back.vertices[i], mesh.vertices[i]);
    EXPECT_EQ(back.normals[i], mesh.normals[i]);
  }
}

TEST(ObjIo, FaceIndexOutOfRangeNamesLine) {
  TempDir dir("objbad");
  std::ofstream(dir / "bad.obj") << "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\nf 1 2 7\n";
  try {
    (void)read_obj(dir / "bad.obj");
    FAIL() << "expected an error";
  } catch (const Error& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find(":5"), std::string::npos) << msg;
    EXPECT_NE(msg.find("out of range"), std::string::npos) << msg;
  }
}

TEST(PlyIo, RoundTripIsExactForFloatValues) {
  TempDir dir("ply");
  PointCloud c;
  Rng rng(4);
  for (int i = 0; i < 257; ++i) {
    c.positions.emplace_back(static_cast<float>(rng.normal()), static_cast<float>(rng.normal()),
                             static_cast<float>(rng.normal()));
    c.normals.push_back(Vec3(static_cast<float>(rng.normal()), static_cast<float>(rng.normal()), 1.0f));
  }
  write_ply(dir / "c.ply", c);
  const PointCloud back = read_ply(dir / "c.ply");
  ASSERT_EQ(back.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(back.positions[i], c.positions[i]);
    EXPECT_EQ(back.normals[i], c.normals[i]);
  }
  write_ply(dir / "d.ply", back);
  std::ifstream f1(dir / "c.ply", std::ios::binary), f2(dir / "d.ply", std::ios::binary);
  EXPECT_EQ(std::string(std::istreambuf_iterator<char>(f1), {}), std::string(std::istreambuf_iterator<char>(f2), {}));
}

TEST(PlyIo, EmptyCloudWritesNothing) {
  TempDir dir("plyempty");
  EXPECT_THROW(write_ply(dir / "e.ply", PointCloud{}), Error);
  EXPECT_FALSE(std::filesystem::exists(dir / "e.ply"));
}

TEST(PlyIo, HeaderDeclaresVertexCount) {
  TempDir dir("plyhdr");
  PointCloud c;
  c.positions = random_points(13, 1);
  write_ply(dir / "c.ply", c);
  std::ifstream in(dir / "c.ply", std::ios::binary);
  std::string line;
  bool found = false;
  while (std::getline(in, line) && line != "end_header") found = found || line == "element vertex 13";
  EXPECT_TRUE(found);
  EXPECT_EQ(std::filesystem::file_size(dir / "c.ply"),
            static_cast<std::uintmax_t>(in.tellg()) + 13u * 6u * 4u);
}

// ---- uv atlas ------------------------------------------------------------

TEST(UvAtlas, TexelCenterReturnsTexel) {
  FeatureGrid g{4, 3, Matrix(12, 2)};
  for (int i = 0; i < 12; ++i) g.values.row(i) << i, -i;
  const Vec2 center((2 + 0.5) / 4, (1 + 0.5) / 3);
  EXPECT_EQ(bilinear_sample(g, center), Eigen::Vector2d(6, -6));
  EXPECT_THROW((void)bilinear_sample(g, Vec2(1.2, 0.5)), Error);
}

TEST(UvAtlas, EveryTexelOfRasterMapsToSurface) {
  const auto body = body::build_humanoid();
  const auto r = rasterize_atlas(*body.atlas, body.faces, 32, 32);
  ASSERT_EQ(r.texels.size(), 32u * 32u);
  EXPECT_GT(std::count(r.covered.begin(), r.covered.end(), true), 100);
  for (const auto& t : r.texels) {
    EXPECT_GE(t.face, 0);
    EXPECT_NEAR(t.bary[0] + t.bary[1] + t.bary[2], 1.0, 1e-12);
  }
}

}  // namespace
}  // namespace surfcloth
