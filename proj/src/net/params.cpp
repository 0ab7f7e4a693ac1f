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

#include "surfcloth/net/params.hpp"

#include <cmath>
#include <cstring>

#include "surfcloth/random.hpp"

namespace surfcloth::net {

int ParameterStore::add(const std::string& name, int rows, int cols, Init init, double gain) {
  if (rows < 1 || cols < 1) {
    throw Error("parameter " + name + " has an empty shape " + std::to_string(rows) + "x" +
                std::to_string(cols));
  }
  if (auto it = index_.find(name); it != index_.end()) {
    const Tensor& t = tensors_[it->second];
    if (t.value.rows() != rows || t.value.cols() != cols) {
      throw Error("parameter " + name + " re-registered with a different shape");
    }
    return it->second;
  }
  Tensor t;
  t.name = name;
  t.value = Matrix::Zero(rows, cols);
  t.grad = Matrix::Zero(rows, cols);
  Rng rng(mix_seed(seed_, fnv1a(name)));
  switch (init) {
    case Init::kZero:
      break;
    case Init::kFanInUniform: {
      const double bound = gain / std::sqrt(static_cast<double>(rows));
      for (Eigen::Index i = 0; i < t.value.size(); ++i) t.value.data()[i] = rng.uniform(-bound, bound);
      break;
    }
    case Init::kNormal:
      for (Eigen::Index i = 0; i < t.value.size(); ++i) t.value.data()[i] = gain * rng.normal();
      break;
  }
  const int id = static_cast<int>(tensors_.size());
  tensors_.push_back(std::move(t));
  index_.emplace(name, id);
  return id;
}

int ParameterStore::index_of(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw Error("unknown parameter " + std::string(name));
  return it->second;
}

bool ParameterStore::contains(std::string_view name) const {
  return index_.find(std::string(name)) != index_.end();
}

void ParameterStore::zero_grad() {
  for (Tensor& t : tensors_) t.grad.setZero();
}

std::size_t ParameterStore::parameter_count() const {
  std::size_t n = 0;
  for (const Tensor& t : tensors_) n += static_cast<std::size_t>(t.value.size());
  return n;
}

bool ParameterStore::same_values(const ParameterStore& other) const {
  if (tensors_.size() != other.tensors_.size()) return false;
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    const Tensor& a = tensors_[i];
    const Tensor& b = other.tensors_[i];
    if (a.name != b.name || a.value.rows() != b.value.rows() || a.value.cols() != b.value.cols()) {
      return false;
    }
    if (std::memcmp(a.value.data(), b.value.data(), sizeof(double) * a.value.size()) != 0) {
      return false;
    }
  }
  return true;
}

}  // namespace surfcloth::net
