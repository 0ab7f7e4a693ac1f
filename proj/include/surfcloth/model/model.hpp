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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "surfcloth/body/pose.hpp"
#include "surfcloth/geom/template_body.hpp"
#include "surfcloth/geom/uv_atlas.hpp"
#include "surfcloth/net/encoder.hpp"
#include "surfcloth/net/mlp.hpp"
#include "surfcloth/net/params.hpp"
#include "surfcloth/net/tape.hpp"

namespace surfcloth::model {

struct ModelConfig {
  std::vector<int> abstraction_counts;  // empty: EncoderConfig::default_counts(N)
  int neighborhood = 16;
  std::vector<int> pose_widths{64, 64, 128, 128, 128, 128};
  std::vector<int> garment_widths{32, 32, 64, 64, 64, 64};
  int pose_feature_width = 64;
  int garment_feature_width = 64;
  int code_width = 64;
  double code_sigma = 0.01;
  std::vector<int> decoder_hidden{256, 256, 256, 256};
  int decoder_skip = 2;
  double decoder_output_gain = 0.01;

  bool pose_residual_input = true;          // pose encoder sees V^u and V^u - V^t
  bool garment_relative_positions = false;  // keeps a zero code mapping to zero features
  bool etd = true;                          // false: one head predicts the whole displacement
  bool garment_to_pose_decoder = true;
  bool uv_features = false;  // interpolate features through a seamed UV grid instead of the surface
  int uv_resolution = 64;
  std::uint64_t seed = 0;

  /// Small widths used for CPU-only experiments.
  [[nodiscard]] static ModelConfig desk();

  void validate() const;
  [[nodiscard]] nlohmann::json to_json() const;
  [[nodiscard]] static ModelConfig from_json(const nlohmann::json& j);
};

/// One emitted point with its full decomposition.
struct DeformationSample {
  SurfacePoint sp;
  Vec3 p_t = Vec3::Zero();
  Vec3 p_u = Vec3::Zero();
  LocalFrame frame;
  Vec3 r_g = Vec3::Zero();
  Vec3 r_p = Vec3::Zero();
  Vec3 normal_local = Vec3::UnitZ();
  Vec3 x_world = Vec3::Zero();
  Vec3 n_world = Vec3::UnitZ();

  [[nodiscard]] Vec3 r() const { return r_g + r_p; }
};

/// Query points with their feature-interpolation map (vertices -> points).
struct PointSet {
  std::vector<SurfacePoint> points;
  net::RowMapPtr interp;
  Matrix p_t;  // M x 3 template positions
};

/// Local frames of a point set on a posed body.
struct FrameSet {
  std::shared_ptr<const std::vector<Mat3>> rotations;
  Matrix origins;  // M x 3, p^u
};

/// Tape handles of one decoded point set.
struct DecodeVars {
  net::Var r_g;  // invalid without ETD
  net::Var r_p;  // with ETD the wrinkle part; without it the full displacement
  net::Var r;
  net::Var normal_raw;
  net::Var x_world;
  net::Var n_world;
  net::Var x_template;  // world points from r^g alone; only when requested
};

class DeformationModel {
 public:
  DeformationModel(TemplateBody body, ModelConfig config);

  DeformationModel(const DeformationModel&) = delete;
  DeformationModel& operator=(const DeformationModel&) = delete;
  DeformationModel(DeformationModel&&) = default;

  /// Registers the garment code of an outfit (idempotent); returns its tensor index.
  int add_outfit(const std::string& outfit);
  [[nodiscard]] bool has_outfit(const std::string& outfit) const;
  [[nodiscard]] const std::vector<std::string>& outfits() const { return outfits_; }
  [[nodiscard]] std::string code_name(const std::string& outfit) const;

  [[nodiscard]] const TemplateBody& body() const { return body_; }
  [[nodiscard]] const ModelConfig& config() const { return config_; }
  [[nodiscard]] net::ParameterStore& params() { return params_; }
  [[nodiscard]] const net::ParameterStore& params() const { return params_; }
  [[nodiscard]] const net::PointEncoder& pose_encoder() const { return *pose_encoder_; }
  [[nodiscard]] const net::PointEncoder& garment_encoder() const { return *garment_encoder_; }

  [[nodiscard]] PointSet make_points(std::vector<SurfacePoint> points) const;
  [[nodiscard]] PointSet sample_points(int count, std::uint64_t seed) const;
  [[nodiscard]] FrameSet frames(const body::PosedBody& posed, const PointSet& points) const;

  [[nodiscard]] Matrix pose_input(const body::PosedBody& posed) const;
  [[nodiscard]] net::Var garment_features(net::Tape& tape, const std::string& outfit) const;
  [[nodiscard]] net::Var pose_features(net::Tape& tape, const body::PosedBody& posed) const;
  [[nodiscard]] DecodeVars decode(net::Tape& tape, net::Var garment_vertex_features,
                                  net::Var pose_vertex_features, const PointSet& points,
                                  const FrameSet& frames, bool want_template = false) const;

  /// Per-vertex garment features as plain values (pose-independent).
  [[nodiscard]] Matrix garment_feature_values(const std::string& outfit) const;

  /// r^g at the points; zero without ETD.
  [[nodiscard]] Matrix garment_displacement(const Matrix& garment_vertex_features,
                                            const PointSet& points) const;

  /// Full pipeline for one pose; throws on an unknown outfit.
  [[nodiscard]] std::vector<DeformationSample> forward(const body::Pose& pose,
                                                       const std::string& outfit,
                                                       std::span<const SurfacePoint> points) const;

  /// Identity-pose points displaced by r^g only.
  [[nodiscard]] PointCloud template_preview(const std::string& outfit,
                                            std::span<const SurfacePoint> points) const;

  /// One cloud per pose over a fixed point set.
  [[nodiscard]] std::vector<PointCloud> animate(std::span<const body::Pose> poses,
                                                const std::string& outfit, int count,
                                                std::uint64_t seed) const;

 private:
  void require_outfit(const std::string& outfit) const;

  TemplateBody body_;
  ModelConfig config_;
  net::ParameterStore params_;
  std::shared_ptr<const net::EncoderTopology> topology_;
  std::unique_ptr<net::PointEncoder> pose_encoder_;
  std::unique_ptr<net::PointEncoder> garment_encoder_;
  std::unique_ptr<net::Mlp> garment_decoder_;  // ETD only
  std::unique_ptr<net::Mlp> pose_decoder_;     // the single head without ETD
  std::shared_ptr<const UvRaster> raster_;
  std::vector<std::string> outfits_;
};

/// Initial parameters of a model over `body` (encoders, decoders, no codes).
[[nodiscard]] net::ParameterStore init_parameters(const TemplateBody& body, const ModelConfig& config);

/// Feature-interpolation map from vertices to points through the UV raster:
/// bilinear over four texels, each texel a barycentric combination of vertices.
[[nodiscard]] net::RowMapPtr uv_interpolation_map(const UvAtlas& atlas, const UvRaster& raster,
                                                  int vertex_count,
                                                  std::span<const SurfacePoint> points);

/// Barycentric feature-interpolation map from vertices to points.
[[nodiscard]] net::RowMapPtr surface_interpolation_map(int vertex_count,
                                                       std::span<const SurfacePoint> points);

}  // namespace surfcloth::model
