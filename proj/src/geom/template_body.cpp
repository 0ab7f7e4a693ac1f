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

#include "surfcloth/geom/template_body.hpp"

#include <cmath>
#include <string>

namespace surfcloth {

std::vector<Vec3> Skeleton::rest_positions() const {
  std::vector<Vec3> out(parents.size());
  for (std::size_t j = 0; j < parents.size(); ++j) {
    out[j] = parents[j] < 0 ? offsets[j] : Vec3(out[parents[j]] + offsets[j]);
  }
  return out;
}

void Skeleton::validate() const {
  if (parents.empty()) throw Error("skeleton has no joints");
  if (offsets.size() != parents.size()) throw Error("skeleton offsets do not match joint count");
  if (!names.empty() && names.size() != parents.size()) {
    throw Error("skeleton names do not match joint count");
  }
  if (parents[0] != -1) throw Error("joint 0 must be the root");
  for (std::size_t j = 1; j < parents.size(); ++j) {
    if (parents[j] < 0 || parents[j] >= static_cast<int>(j)) {
      throw Error("joint " + std::to_string(j) + " must have a parent with a lower index");
    }
  }
}

void TemplateBody::validate(double skin_tolerance) const {
  const int n = vertex_count();
  if (n == 0) throw Error("template body has no vertices");
  for (std::size_t f = 0; f < faces.size(); ++f) {
    for (int v : faces[f]) {
      if (v < 0 || v >= n) {
        throw Error("face " + std::to_string(f) + " references invalid vertex " + std::to_string(v));
      }
    }
  }
  if (normals.size() != vertices.size()) throw Error("template normals do not match vertex count");
  skeleton.validate();
  if (skinning.rows() != n || skinning.cols() != skeleton.joint_count()) {
    throw Error("skinning matrix must be N x J");
  }
  for (int i = 0; i < n; ++i) {
    if ((skinning.row(i).array() < 0.0).any()) {
      throw Error("negative skinning weight in row " + std::to_string(i));
    }
    const double s = skinning.row(i).sum();
    if (std::abs(s - 1.0) > skin_tolerance) {
      throw Error("skinning row " + std::to_string(i) + " sums to " + std::to_string(s));
    }
  }
  if (atlas && atlas->face_uvs.size() != faces.size()) {
    throw Error("uv atlas does not cover every face");
  }
}

}  // namespace surfcloth
