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

#include <filesystem>

#include "surfcloth/geom/types.hpp"

namespace surfcloth {

/// ASCII OBJ with `v`, `vn` and `f` records. Coordinates are written in the
/// shortest form that parses back to the identical double.
void write_obj(const std::filesystem::path& path, const TriMesh& mesh);

/// Reads `v`, `vn` and `f` records; other records are ignored. Face entries
/// may use the `v`, `v/vt`, `v//vn` or `v/vt/vn` forms and must be triangles.
/// Errors carry the path and line number.
[[nodiscard]] TriMesh read_obj(const std::filesystem::path& path);

/// Binary little-endian PLY with float32 x, y, z, nx, ny, nz per vertex.
/// Clouds without normals are written with zero normals. An empty cloud is
/// rejected before the file is created.
void write_ply(const std::filesystem::path& path, const PointCloud& cloud);

/// Reads files produced by `write_ply` (any float32 vertex layout that
/// contains x, y, z and optionally nx, ny, nz). All-zero normals are dropped.
[[nodiscard]] PointCloud read_ply(const std::filesystem::path& path);

}  // namespace surfcloth
