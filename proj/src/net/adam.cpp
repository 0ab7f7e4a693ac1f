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

#include "surfcloth/net/adam.hpp"

#include <cmath>

namespace surfcloth::net {

void Adam::step(ParameterStore& store) {
  auto& tensors = store.tensors();
  // tensors registered after the first step (new outfits) get fresh moments
  while (m_.size() < tensors.size()) {
    const auto& t = tensors[m_.size()];
    m_.push_back(Matrix::Zero(t.value.rows(), t.value.cols()));
    v_.push_back(Matrix::Zero(t.value.rows(), t.value.cols()));
  }
  if (m_.size() != tensors.size()) throw Error("optimizer state does not match the parameter store");
  ++t_;
  const double c1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    auto& t = tensors[i];
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * t.grad;
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * t.grad.cwiseAbs2();
    t.value.array() -= config_.learning_rate * (m_[i].array() / c1) /
                       ((v_[i].array() / c2).sqrt() + config_.epsilon);
  }
}

}  // namespace surfcloth::net
