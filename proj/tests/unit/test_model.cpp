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

#include <cstring>

#include "helpers.hpp"
#include "surfcloth/body/humanoid.hpp"
#include "surfcloth/geom/surface.hpp"
#include "surfcloth/model/model.hpp"

namespace surfcloth::model {
namespace {

using body::Pose;

TemplateBody small_body() {
  body::HumanoidConfig h;
  h.subdivisions = 0;
  h.rings_per_segment = 4;
  return body::build_humanoid(h);
}

ModelConfig small_config() {
  ModelConfig c = ModelConfig::desk();
  c.pose_widths = {8, 8, 12, 12, 16, 16};
  c.garment_widths = {8, 8, 8, 8, 8, 8};
  c.pose_feature_width = 8;
  c.garment_feature_width = 8;
  c.code_width = 8;
  c.decoder_hidden = {16, 16, 16, 16};
  c.decoder_output_gain = 1.0;  // visible displacements without training
  c.seed = 3;
  return c;
}

Pose random_pose(int joints, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec3> aa(joints);
  for (auto& a : aa) a = Vec3(rng.normal(), rng.normal(), rng.normal()) * 0.4;
  return Pose::from_axis_angle(aa, Vec3(rng.normal(), rng.normal(), rng.normal()) * 0.1);
}

void zero_decoders(DeformationModel& m) {
  for (auto& t : m.params().tensors()) {
    if (t.name.starts_with("dec")) t.value.setZero();
  }
}

class ModelTest : public ::testing::Test {
 protected:
  void SetUp() override {
    model = std::make_unique<DeformationModel>(small_body(), small_config());
    model->add_outfit("jacket");
    points = sample_surface(model->body().vertices, model->body().faces, 300, 7);
  }
  [[nodiscard]] int joints() const { return model->body().skeleton.joint_count(); }
  std::unique_ptr<DeformationModel> model;
  std::vector<SurfacePoint> points;
};

TEST(ModelConfig, JsonRoundTripAndValidation) {
  ModelConfig c = small_config();
  c.etd = false;
  c.abstraction_counts = {64, 32, 16};
  const ModelConfig back = ModelConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
  c.neighborhood = 0;
  EXPECT_THROW(c.validate(), Error);
  EXPECT_THROW((void)ModelConfig::from_json({{"etd", "yes"}}), Error);
}

TEST(ModelConfig, SameSeedSameParameters) {
  const auto body = small_body();
  const auto a = init_parameters(body, small_config());
  const auto b = init_parameters(body, small_config());
  ModelConfig other = small_config();
  other.seed = 4;
  const auto c = init_parameters(body, other);
  EXPECT_TRUE(a.same_values(b));
  EXPECT_FALSE(a.same_values(c));
}

TEST(ModelConfig, ZeroWidthLayerRejected) {
  ModelConfig c = small_config();
  c.decoder_hidden[1] = 0;
  EXPECT_THROW(DeformationModel(small_body(), c), Error);
  c = small_config();
  c.pose_widths[2] = 0;
  EXPECT_THROW(DeformationModel(small_body(), c), Error);
}

TEST_F(ModelTest, GarmentCodeShapeAndScale) {
  const auto& code = model->params().at(model->code_name("jacket")).value;
  EXPECT_EQ(code.rows(), model->body().vertex_count());
  EXPECT_EQ(code.cols(), 8);
  const double sd = std::sqrt(code.array().square().mean());
  EXPECT_NEAR(sd, 0.01, 1e-3);
  const auto count = model->params().size();
  model->add_outfit("jacket");
  EXPECT_EQ(model->params().size(), count);
  EXPECT_EQ(model->outfits().size(), 1u);
}

TEST_F(ModelTest, FullSizeCodeIsNx64) {
  DeformationModel m(small_body(), ModelConfig::desk());
  m.add_outfit("a");
  EXPECT_EQ(m.params().at(m.code_name("a")).value.cols(), 64);
}

TEST_F(ModelTest, UnknownOutfitRejected) {
  EXPECT_THROW((void)model->forward(Pose::identity(joints()), "skirt", points), Error);
  EXPECT_THROW((void)model->template_preview("skirt", points), Error);
  EXPECT_THROW((void)model->add_outfit(""), Error);
}

TEST_F(ModelTest, ZeroDecodersKeepClothingOnTheBody) {
  zero_decoders(*model);
  const auto samples = model->forward(random_pose(joints(), 1), "jacket", points);
  for (const auto& s : samples) {
    EXPECT_EQ(s.x_world, s.p_u);
    EXPECT_TRUE(s.n_world.isApprox(s.frame.rotation.col(2), 1e-14));
  }
  const auto tmpl = model->template_preview("jacket", points);
  for (std::size_t i = 0; i < points.size(); ++i) {
    EXPECT_LE((tmpl.positions[i] - position_at(model->body().vertices, points[i])).norm(), 1e-15);
  }
  const auto clouds = model->animate(std::vector<Pose>{Pose::identity(joints())}, "jacket", 200, 3);
  const auto sp = sample_surface(model->body().vertices, model->body().faces, 200, 3);
  for (std::size_t i = 0; i < sp.size(); ++i) {
    EXPECT_LE((clouds[0].positions[i] - position_at(model->body().vertices, sp[i])).norm(), 1e-15);
  }
}

TEST_F(ModelTest, SampleInvariants) {
  const auto samples = model->forward(random_pose(joints(), 2), "jacket", points);
  ASSERT_EQ(samples.size(), points.size());
  for (const auto& s : samples) {
    EXPECT_EQ(s.x_world, Vec3(s.frame.rotation * (s.r_g + s.r_p) + s.p_u));
    EXPECT_LE((s.n_world - (s.frame.rotation * s.normal_local).normalized()).norm(), 1e-14);
    EXPECT_NEAR(s.n_world.norm(), 1.0, 1e-14);
    EXPECT_EQ(s.r(), Vec3(s.r_g + s.r_p));
    EXPECT_GT(s.r_g.norm(), 0.0);
    EXPECT_GT(s.r_p.norm(), 0.0);
  }
}

TEST_F(ModelTest, DeterministicForward) {
  const Pose p = random_pose(joints(), 3);
  const auto a = model->forward(p, "jacket", points);
  const auto b = model->forward(p, "jacket", points);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].x_world, b[i].x_world);
    EXPECT_EQ(a[i].n_world, b[i].n_world);
  }
}

TEST_F(ModelTest, GarmentPathIsPoseInvariant) {
  const Matrix g = model->garment_feature_values("jacket");
  std::vector<Vec3> first;
  for (int k = 0; k < 5; ++k) {
    const auto s = model->forward(random_pose(joints(), 10 + k), "jacket", points);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (k == 0) {
        first.push_back(s[i].r_g);
      } else {
        EXPECT_EQ(std::memcmp(first[i].data(), s[i].r_g.data(), sizeof(double) * 3), 0);
      }
    }
  }
  EXPECT_EQ(model->garment_feature_values("jacket"), g);
}

TEST_F(ModelTest, ZeroCodeGivesZeroGarmentFeatures) {
  model->params().at(model->code_name("jacket")).value.setZero();
  EXPECT_TRUE(model->garment_feature_values("jacket").isZero(0.0));
}

TEST_F(ModelTest, TemplatePreviewMatchesIdentityGarmentPath) {
  const auto a = model->template_preview("jacket", points);
  const auto b = model->template_preview("jacket", points);
  const auto rest = model->forward(Pose::identity(joints()), "jacket", points);
  for (std::size_t i = 0; i < points.size(); ++i) {
    EXPECT_EQ(a.positions[i], b.positions[i]);
    const Vec3 want = rest[i].frame.rotation * rest[i].r_g + rest[i].p_u;
    EXPECT_LE((a.positions[i] - want).norm(), 1e-14);
  }
}

TEST_F(ModelTest, AnimateUsesFixedPointSet) {
  const Pose p = random_pose(joints(), 4);
  const auto clouds = model->animate(std::vector<Pose>{p, random_pose(joints(), 5), p}, "jacket", 256, 9);
  ASSERT_EQ(clouds.size(), 3u);
  EXPECT_EQ(clouds[0].positions, clouds[2].positions);
  EXPECT_NE(clouds[0].positions, clouds[1].positions);
  const auto sp = sample_surface(model->body().vertices, model->body().faces, 256, 9);
  const auto direct = model->forward(p, "jacket", sp);
  for (std::size_t i = 0; i < sp.size(); ++i) EXPECT_LE((clouds[0].positions[i] - direct[i].x_world).norm(), 1e-14);
}

TEST_F(ModelTest, SharedEdgePredictionsAgree) {
  const auto& body = model->body();
  const auto edges = shared_edges(body.faces);
  Rng rng(12);
  std::vector<SurfacePoint> a, b;
  for (int s = 0; s < 500; ++s) {
    const auto& e = edges[rng.below(edges.size())];
    const double t = rng.uniform();
    a.push_back(edge_point(body.faces, e.face_a, e.v0, e.v1, t));
    b.push_back(edge_point(body.faces, e.face_b, e.v0, e.v1, t));
  }
  const Pose p = random_pose(joints(), 6);
  const auto sa = model->forward(p, "jacket", a);
  const auto sb = model->forward(p, "jacket", b);
  for (std::size_t i = 0; i < sa.size(); ++i) {
    EXPECT_LE((sa[i].r() - sb[i].r()).norm(), 1e-9);
    EXPECT_LE((sa[i].p_u - sb[i].p_u).norm(), 1e-12);
    EXPECT_LE((sa[i].frame.rotation.col(2) - sb[i].frame.rotation.col(2)).norm(), 1e-12);
  }
}

TEST_F(ModelTest, RigidMotionOfPosedBodyRotatesOutputs) {
  // Local displacements held fixed; frames come from the moved mesh.
  const Pose p = random_pose(joints(), 7);
  const auto posed = body::lbs_pose(model->body(), p);
  const Mat3 r = testing::random_rotation(8);
  const Vec3 t(0.5, 0.1, -0.3);
  body::PosedBody moved = posed;
  for (auto& v : moved.vertices) v = r * v + t;
  for (auto& n : moved.normals) n = r * n;
  const PointSet ps = model->make_points(points);
  net::Tape tape(model->params());
  net::Var g = model->garment_features(tape, "jacket");
  net::Var f = model->pose_features(tape, posed);
  const auto da = model->decode(tape, g, f, ps, model->frames(posed, ps));
  const auto db = model->decode(tape, g, f, ps, model->frames(moved, ps));
  const Matrix& xa = tape.value(da.x_world);
  const Matrix& xb = tape.value(db.x_world);
  const Matrix& na = tape.value(da.n_world);
  const Matrix& nb = tape.value(db.n_world);
  for (Eigen::Index i = 0; i < xa.rows(); ++i) {
    EXPECT_LE((xb.row(i).transpose() - (r * xa.row(i).transpose() + t)).norm(), 1e-6);
    EXPECT_LE((nb.row(i).transpose() - r * na.row(i).transpose()).norm(), 1e-6);
  }
}

TEST_F(ModelTest, NoEtdHasSingleHead) {
  ModelConfig c = small_config();
  c.etd = false;
  DeformationModel m(small_body(), c);
  m.add_outfit("jacket");
  EXPECT_TRUE(m.params().contains("dec/out/w"));
  EXPECT_FALSE(m.params().contains("dec_g/out/w"));
  const auto s = m.forward(random_pose(joints(), 9), "jacket", points);
  for (const auto& x : s) EXPECT_EQ(x.r_g, Vec3::Zero());
  const auto tmpl = m.template_preview("jacket", points);
  for (std::size_t i = 0; i < points.size(); ++i) {
    EXPECT_LE((tmpl.positions[i] - position_at(m.body().vertices, points[i])).norm(), 1e-15);
  }
}

TEST_F(ModelTest, GarmentToPoseDecoderFlagChangesInputWidth) {
  ModelConfig c = small_config();
  c.garment_to_pose_decoder = false;
  DeformationModel m(small_body(), c);
  EXPECT_EQ(m.params().at("dec_p/l0/w").value.rows(), 8 + 3);
  EXPECT_EQ(model->params().at("dec_p/l0/w").value.rows(), 8 + 8 + 3);
}

TEST(InterpolationMaps, RowsArePartitionsOfUnity) {
  const auto body = small_body();
  const auto sp = sample_surface(body.vertices, body.faces, 400, 2);
  const auto raster = rasterize_atlas(*body.atlas, body.faces, 32, 32);
  for (const auto& map :
       {surface_interpolation_map(body.vertex_count(), sp), uv_interpolation_map(*body.atlas, raster, body.vertex_count(), sp)}) {
    ASSERT_EQ(map->out_rows(), 400);
    for (int r = 0; r < map->out_rows(); ++r) {
      double total = 0.0;
      for (const auto& [c, w] : map->row(r)) {
        EXPECT_GE(w, -1e-15);
        total += w;
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(InterpolationMaps, UvFeaturesJumpAcrossSeams) {
  ModelConfig c = small_config();
  c.uv_features = true;
  c.uv_resolution = 32;
  DeformationModel m(small_body(), c);
  m.add_outfit("jacket");
  const auto& body = m.body();
  Rng rng(2);
  double worst = 0.0;
  for (const auto& e : shared_edges(body.faces)) {
    bool seam = false;
    for (int k = 0; k < 3 && !seam; ++k) {
      for (int j = 0; j < 3; ++j) {
        if (body.faces[e.face_a][k] == e.v0 && body.faces[e.face_b][j] == e.v0) {
          seam = body.atlas->face_uvs[e.face_a][k] != body.atlas->face_uvs[e.face_b][j];
        }
      }
    }
    if (!seam) continue;
    const double t = rng.uniform();
    const auto pa = m.make_points({edge_point(body.faces, e.face_a, e.v0, e.v1, t)});
    const auto pb = m.make_points({edge_point(body.faces, e.face_b, e.v0, e.v1, t)});
    Matrix field(body.vertex_count(), 1);
    for (int v = 0; v < body.vertex_count(); ++v) field(v, 0) = body.vertices[v].y();
    Matrix fa(1, 1), fb(1, 1);
    pa.interp->apply(field, fa);
    pb.interp->apply(field, fb);
    worst = std::max(worst, std::abs(fa(0, 0) - fb(0, 0)));
  }
  EXPECT_GT(worst, 1e-3);
}

}  // namespace
}  // namespace surfcloth::model
