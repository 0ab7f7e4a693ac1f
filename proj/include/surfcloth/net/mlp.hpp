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

#include <string>
#include <vector>

#include "surfcloth/net/params.hpp"
#include "surfcloth/net/tape.hpp"

namespace surfcloth::net {

/// Pointwise decoder: ReLU hidden layers, linear output. The network input is
/// concatenated again onto the input of hidden layer `skip_layer` (0-based;
/// -1 disables the skip).
struct MlpConfig {
  int input_width = 0;
  std::vector<int> hidden{256, 256, 256, 256};
  int output_width = 3;
  int skip_layer = 2;
  double output_gain = 0.01;  // init scale of the last layer, keeps early outputs small

  void validate() const;
};

class Mlp {
 public:
  Mlp(std::string prefix, MlpConfig config);

  void register_parameters(ParameterStore& store) const;
  [[nodiscard]] Var forward(Tape& tape, Var input) const;

  [[nodiscard]] const MlpConfig& config() const { return config_; }
  [[nodiscard]] const std::string& prefix() const { return prefix_; }

 private:
  std::string prefix_;
  MlpConfig config_;
};

}  // namespace surfcloth::net
