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

#include "surfcloth/geom/template_body.hpp"

namespace surfcloth::body {

/// Procedural rigged humanoid standing in a T-pose, y up, about 1.8 m tall.
///
/// The mesh is box-modelled: a torso block with extruded limbs and head,
/// smoothed by Catmull-Clark subdivision and triangulated. The result is a
/// closed two-manifold of genus zero. Skinning weights fall off smoothly with
/// distance to the bone segments of a 16-joint skeleton.
struct HumanoidConfig {
  int subdivisions = 1;       // Catmull-Clark levels, 0..3
  int rings_per_segment = 3;  // cross-sections per limb segment, 1..16
  double height_scale = 1.0;  // uniform scale, 0.5..2
  double girth_scale = 1.0;   // limb and torso thickness, 0.5..2
  double skin_falloff = 0.04; // meters; width of the weight blend near joints

  void validate() const;
};

inline constexpr int kHumanoidJoints = 16;

[[nodiscard]] TemplateBody build_humanoid(const HumanoidConfig& config = {});

}  // namespace surfcloth::body
