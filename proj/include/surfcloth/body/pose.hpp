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

#include <vector>

#include "surfcloth/geom/template_body.hpp"
#include "surfcloth/geom/types.hpp"

namespace surfcloth::body {

/// Per-joint local rotations (parent-relative) and a root translation.
struct Pose {
  std::vector<Mat3> rotations;
  Vec3 root_translation = Vec3::Zero();

  [[nodiscard]] static Pose identity(int joints);
  [[nodiscard]] static Pose from_axis_angle(const std::vector<Vec3>& axis_angles,
                                            const Vec3& root_translation = Vec3::Zero());
  [[nodiscard]] std::vector<Vec3> axis_angles() const;
  [[nodiscard]] int joint_count() const { return static_cast<int>(rotations.size()); }

  /// Throws unless every rotation is orthonormal with determinant +1.
  void validate(double tolerance = 1e-9) const;
};

[[nodiscard]] Mat3 axis_angle_to_matrix(const Vec3& axis_angle);
[[nodiscard]] Vec3 matrix_to_axis_angle(const Mat3& rotation);

/// Unclothed body in a pose; shares topology with its template.
struct PosedBody {
  std::vector<Vec3> vertices;
  std::vector<Vec3> normals;
};

/// World transform of every joint: x_world = rotation * x_joint + translation.
struct JointTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
};

[[nodiscard]] std::vector<JointTransform> joint_world_transforms(const Skeleton& skeleton,
                                                                 const Pose& pose);

/// Linear blend skinning. The identity pose reproduces the template exactly.
[[nodiscard]] PosedBody lbs_pose(const TemplateBody& body, const Pose& pose);

}  // namespace surfcloth::body
