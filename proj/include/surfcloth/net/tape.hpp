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
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "surfcloth/geom/kernels.hpp"
#include "surfcloth/geom/types.hpp"
#include "surfcloth/net/params.hpp"

namespace surfcloth::net {

/// Fixed sparse linear map between row sets: out.row(r) = sum_k w_k in.row(c_k).
/// Covers gathers, barycentric interpolation and feature upsampling. The
/// transpose is stored too so the backward pass is a gather as well.
class RowMap {
 public:
  using Entry = std::pair<int, double>;

  RowMap(int in_rows, const std::vector<std::vector<Entry>>& rows);

  [[nodiscard]] int in_rows() const { return in_rows_; }
  [[nodiscard]] int out_rows() const { return static_cast<int>(offsets_.size()) - 1; }

  void apply(const Matrix& in, Matrix& out) const;
  void apply_transpose_add(const Matrix& grad_out, Matrix& grad_in) const;

  [[nodiscard]] std::vector<Entry> row(int r) const;

 private:
  int in_rows_;
  std::vector<int> offsets_;
  std::vector<int> cols_;
  std::vector<double> weights_;
  std::vector<int> t_offsets_;
  std::vector<int> t_rows_;
  std::vector<double> t_weights_;
};

using RowMapPtr = std::shared_ptr<const RowMap>;

/// Handle to a value recorded on a tape.
struct Var {
  int id = -1;
  [[nodiscard]] bool valid() const { return id >= 0; }
};

/// Reverse-mode recording of matrix operations. Every op evaluates eagerly
/// and records how to push gradients to its inputs. Parameters are read from
/// a store; `backward` accumulates into that store's gradient buffers.
class Tape {
 public:
  explicit Tape(const ParameterStore& store) : store_(&store) {}

  Var param(std::string_view name);
  Var param(int index);
  Var constant(Matrix value);

  Var linear(Var x, Var weight, Var bias);  // x * weight + bias (bias broadcast over rows)
  Var relu(Var x);
  Var concat_cols(std::span<const Var> parts);
  Var concat_cols(std::initializer_list<Var> parts) {
    return concat_cols(std::span<const Var>(parts.begin(), parts.size()));
  }
  Var slice_cols(Var x, int start, int count);
  Var rows(Var x, RowMapPtr map);
  Var group_max(Var x, int group);  // max over consecutive groups of rows
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var add_constant(Var x, const Matrix& c);
  Var scale(Var x, double s);
  Var rotate_rows(Var x, std::shared_ptr<const std::vector<Mat3>> rotations);  // row_i <- R_i row_i
  Var normalize_rows(Var x);

  // scalar-valued reductions (1 x 1 results)
  Var mean_squared_norm(Var x);  // (1/rows) sum ||row||^2
  Var mean_abs_diff(Var x, const Matrix& target);  // (1/rows) sum ||row - target||_1

  /// Bidirectional Chamfer of rows of x (M x 3) against a fixed target
  /// point set. `nn_x_in_target` receives the nearest target index of each row.
  Var chamfer(Var x, const KdTree& target, std::vector<int>* nn_x_in_target = nullptr);

  Var weighted_sum(std::span<const std::pair<double, Var>> terms);
  Var weighted_sum(std::initializer_list<std::pair<double, Var>> terms) {
    return weighted_sum(std::span<const std::pair<double, Var>>(terms.begin(), terms.size()));
  }

  [[nodiscard]] const Matrix& value(Var v) const;
  [[nodiscard]] double scalar(Var v) const;
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }

  /// When enabled, ops with a discrete choice (ReLU masks, max selections,
  /// nearest neighbors, signs of absolute values) fold it into a hash. Two
  /// recordings with equal hashes lie on the same smooth piece of the graph.
  void track_branches(bool on = true) { track_branches_ = on; }
  [[nodiscard]] std::uint64_t branch_signature() const { return branches_; }

  /// Gradient of a recorded node after `backward` (zero matrix if unreached).
  [[nodiscard]] Matrix grad(Var v) const;

  /// Propagates d(loss)/d(.) through the recording and adds parameter
  /// gradients into `grads`, which must be the store the tape reads from.
  void backward(Var loss, ParameterStore& grads);

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    std::function<void(Tape&, int)> back;
    int param = -1;
    bool needs_grad = false;
  };

  Var push(Matrix value, bool needs_grad, std::function<void(Tape&, int)> back);
  Node& node(Var v);
  const Node& node(Var v) const;
  Matrix& grad_of(int id);  // lazily allocated
  [[nodiscard]] bool needs(Var v) const { return nodes_[v.id].needs_grad; }

  const ParameterStore* store_;
  std::vector<Node> nodes_;
  std::vector<int> param_nodes_;
  bool backward_done_ = false;
  bool track_branches_ = false;
  std::uint64_t branches_ = 0;

  void fold(std::uint64_t v);
};

}  // namespace surfcloth::net
