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

#include "surfcloth/body/pose.hpp"

#include <cmath>
#include <string>

#include "surfcloth/geom/surface.hpp"

namespace surfcloth::body {

Mat3 axis_angle_to_matrix(const Vec3& axis_angle) {
  const double angle = axis_angle.norm();
  if (angle == 0.0) return Mat3::Identity();
  return Eigen::AngleAxisd(angle, axis_angle / angle).toRotationMatrix();
}

Vec3 matrix_to_axis_angle(const Mat3& rotation) {
  const Eigen::AngleAxisd aa(rotation);
  return aa.angle() * aa.axis();
}

Pose Pose::identity(int joints) {
  Pose p;
  p.rotations.assign(joints, Mat3::Identity());
  return p;
}

Pose Pose::from_axis_angle(const std::vector<Vec3>& axis_angles, const Vec3& root_translation) {
  Pose p;
  p.rotations.reserve(axis_angles.size());
  for (const Vec3& aa : axis_angles) p.rotations.push_back(axis_angle_to_matrix(aa));
  p.root_translation = root_translation;
  return p;
}

std::vector<Vec3> Pose::axis_angles() const {
  std::vector<Vec3> out;
  out.reserve(rotations.size());
  for (const Mat3& r : rotations) out.push_back(matrix_to_axis_angle(r));
  return out;
}

void Pose::validate(double tolerance) const {
  for (std::size_t j = 0; j < rotations.size(); ++j) {
    const Mat3& r = rotations[j];
    const double ortho = (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff();
    if (ortho > tolerance || std::abs(r.determinant() - 1.0) > tolerance) {
      throw Error("joint " + std::to_string(j) + " rotation is not a proper rotation");
    }
  }
}

std::vector<JointTransform> joint_world_transforms(const Skeleton& skeleton, const Pose& pose) {
  const int joints = skeleton.joint_count();
  if (pose.joint_count() != joints) {
    throw Error("pose has " + std::to_string(pose.joint_count()) + " joints, skeleton has " +
                std::to_string(joints));
  }
  std::vector<JointTransform> world(joints);
  for (int j = 0; j < joints; ++j) {
    const int p = skeleton.parents[j];
    if (p < 0) {
      world[j].rotation = pose.rotations[j];
      world[j].translation = pose.root_translation + skeleton.offsets[j];
    } else {
      world[j].rotation = world[p].rotation * pose.rotations[j];
      world[j].translation = world[p].rotation * skeleton.offsets[j] + world[p].translation;
    }
  }
  return world;
}

PosedBody lbs_pose(const TemplateBody& body, const Pose& pose) {
  const auto world = joint_world_transforms(body.skeleton, pose);
  const auto rest = body.skeleton.rest_positions();
  const int joints = body.skeleton.joint_count();
  // skinning transform A_j = G_j * T(-rest_j), kept as (rotation, translation)
  std::vector<Mat3> rot(joints);
  std::vector<Vec3> trans(joints);
  for (int j = 0; j < joints; ++j) {
    rot[j] = world[j].rotation;
    trans[j] = world[j].translation - world[j].rotation * rest[j];
  }

  PosedBody out;
  const int n = body.vertex_count();
  out.vertices.resize(n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    const Vec3& v = body.vertices[i];
    // displacement form keeps the identity pose exact
    Vec3 delta = Vec3::Zero();
    for (int j = 0; j < joints; ++j) {
      const double w = body.skinning(i, j);
      if (w == 0.0) continue;
      delta += w * (rot[j] * v + trans[j] - v);
    }
    out.vertices[i] = v + delta;
  }
  out.normals = vertex_normals(out.vertices, body.faces);
  return out;
}

}  // namespace surfcloth::body
