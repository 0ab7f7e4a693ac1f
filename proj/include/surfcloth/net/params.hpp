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
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "surfcloth/geom/types.hpp"

namespace surfcloth::net {

enum class Init {
  kFanInUniform,  // U(-g/sqrt(fan_in), g/sqrt(fan_in)), fan_in = rows
  kZero,
  kNormal,  // N(0, g^2)
};

/// Named dense parameters with matching gradient buffers. Each tensor's
/// initial values depend only on (seed, name), not on creation order.
class ParameterStore {
 public:
  struct Tensor {
    std::string name;
    Matrix value;
    Matrix grad;
  };

  explicit ParameterStore(std::uint64_t seed = 0) : seed_(seed) {}

  /// Creates a tensor, or returns the existing index if the name and shape match.
  int add(const std::string& name, int rows, int cols, Init init, double gain = 1.0);

  [[nodiscard]] int index_of(std::string_view name) const;
  [[nodiscard]] bool contains(std::string_view name) const;
  [[nodiscard]] std::size_t size() const { return tensors_.size(); }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }

  [[nodiscard]] Tensor& at(int index) { return tensors_.at(index); }
  [[nodiscard]] const Tensor& at(int index) const { return tensors_.at(index); }
  [[nodiscard]] Tensor& at(std::string_view name) { return tensors_.at(index_of(name)); }
  [[nodiscard]] const Tensor& at(std::string_view name) const { return tensors_.at(index_of(name)); }

  [[nodiscard]] std::vector<Tensor>& tensors() { return tensors_; }
  [[nodiscard]] const std::vector<Tensor>& tensors() const { return tensors_; }

  void zero_grad();
  [[nodiscard]] std::size_t parameter_count() const;

  /// Bitwise equality of names, shapes and values.
  [[nodiscard]] bool same_values(const ParameterStore& other) const;

 private:
  std::uint64_t seed_;
  std::vector<Tensor> tensors_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace surfcloth::net
