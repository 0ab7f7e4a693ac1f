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

#include "surfcloth/net/mlp.hpp"

#include <cmath>

namespace surfcloth::net {

void MlpConfig::validate() const {
  if (input_width < 1) throw Error("decoder input width must be positive");
  if (output_width < 1) throw Error("decoder output width must be positive");
  for (int h : hidden) {
    if (h < 1) throw Error("decoder layer width must be positive");
  }
  if (skip_layer >= static_cast<int>(hidden.size()) || skip_layer == 0) {
    throw Error("decoder skip layer must index a hidden layer after the first");
  }
}

Mlp::Mlp(std::string prefix, MlpConfig config) : prefix_(std::move(prefix)), config_(std::move(config)) {
  config_.validate();
}

void Mlp::register_parameters(ParameterStore& store) const {
  int width = config_.input_width;
  for (std::size_t i = 0; i < config_.hidden.size(); ++i) {
    const int in = width + (static_cast<int>(i) == config_.skip_layer ? config_.input_width : 0);
    const std::string p = prefix_ + "/l" + std::to_string(i);
    store.add(p + "/w", in, config_.hidden[i], Init::kFanInUniform, std::sqrt(6.0));
    store.add(p + "/b", 1, config_.hidden[i], Init::kZero);
    width = config_.hidden[i];
  }
  store.add(prefix_ + "/out/w", width, config_.output_width, Init::kFanInUniform, config_.output_gain);
  store.add(prefix_ + "/out/b", 1, config_.output_width, Init::kZero);
}

Var Mlp::forward(Tape& tape, Var input) const {
  if (tape.value(input).cols() != config_.input_width) {
    throw Error("decoder expects input width " + std::to_string(config_.input_width) + ", got " +
                std::to_string(tape.value(input).cols()));
  }
  Var x = input;
  for (std::size_t i = 0; i < config_.hidden.size(); ++i) {
    if (static_cast<int>(i) == config_.skip_layer) x = tape.concat_cols({x, input});
    const std::string p = prefix_ + "/l" + std::to_string(i);
    x = tape.relu(tape.linear(x, tape.param(p + "/w"), tape.param(p + "/b")));
  }
  return tape.linear(x, tape.param(prefix_ + "/out/w"), tape.param(prefix_ + "/out/b"));
}

}  // namespace surfcloth::net
