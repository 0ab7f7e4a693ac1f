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

#include <json.hpp>

#include "surfcloth/net/params.hpp"

namespace surfcloth::net {

// Checkpoint layout, all integers u32 little-endian:
//   "SCLK" | version | metadata length | metadata (UTF-8 JSON)
//   | tensor count | per tensor: name length | name | rows | cols | rows*cols float32 (row-major)
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  nlohmann::json metadata;
  ParameterStore params;
};

/// Values are stored as float32; saving a loaded checkpoint reproduces the
/// file byte for byte.
void save_checkpoint(const std::filesystem::path& path, const ParameterStore& params,
                     const nlohmann::json& metadata);

[[nodiscard]] Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Copies matching tensors of `source` into `target` by name; throws when a
/// tensor of `target` is missing or has a different shape.
void assign_parameters(ParameterStore& target, const ParameterStore& source);

}  // namespace surfcloth::net
