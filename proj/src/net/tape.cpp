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

#include "surfcloth/net/tape.hpp"

#include <cmath>
#include <string>

#include "surfcloth/random.hpp"

namespace surfcloth::net {

// --- RowMap -----------------------------------------------------------------

RowMap::RowMap(int in_rows, const std::vector<std::vector<Entry>>& rows) : in_rows_(in_rows) {
  offsets_.reserve(rows.size() + 1);
  offsets_.push_back(0);
  std::vector<int> per_col(in_rows, 0);
  for (const auto& r : rows) {
    for (const auto& [c, w] : r) {
      if (c < 0 || c >= in_rows) throw Error("row map column out of range");
      cols_.push_back(c);
      weights_.push_back(w);
      ++per_col[c];
    }
    offsets_.push_back(static_cast<int>(cols_.size()));
  }
  t_offsets_.assign(in_rows + 1, 0);
  for (int c = 0; c < in_rows; ++c) t_offsets_[c + 1] = t_offsets_[c] + per_col[c];
  t_rows_.resize(cols_.size());
  t_weights_.resize(cols_.size());
  std::vector<int> fill(t_offsets_.begin(), t_offsets_.end() - 1);
  for (int r = 0; r < out_rows(); ++r) {
    for (int k = offsets_[r]; k < offsets_[r + 1]; ++k) {
      const int slot = fill[cols_[k]]++;
      t_rows_[slot] = r;
      t_weights_[slot] = weights_[k];
    }
  }
}

void RowMap::apply(const Matrix& in, Matrix& out) const {
  if (in.rows() != in_rows_) throw Error("row map input has the wrong number of rows");
  out.setZero(out_rows(), in.cols());
  const int n = out_rows();
#pragma omp parallel for schedule(static) if (n > 2048)
  for (int r = 0; r < n; ++r) {
    for (int k = offsets_[r]; k < offsets_[r + 1]; ++k) out.row(r) += weights_[k] * in.row(cols_[k]);
  }
}

void RowMap::apply_transpose_add(const Matrix& grad_out, Matrix& grad_in) const {
#pragma omp parallel for schedule(static) if (in_rows_ > 2048)
  for (int c = 0; c < in_rows_; ++c) {
    for (int k = t_offsets_[c]; k < t_offsets_[c + 1]; ++k) {
      grad_in.row(c) += t_weights_[k] * grad_out.row(t_rows_[k]);
    }
  }
}

std::vector<RowMap::Entry> RowMap::row(int r) const {
  std::vector<Entry> out;
  for (int k = offsets_[r]; k < offsets_[r + 1]; ++k) out.emplace_back(cols_[k], weights_[k]);
  return out;
}

// --- Tape -------------------------------------------------------------------

Var Tape::push(Matrix value, bool needs_grad, std::function<void(Tape&, int)> back) {
  Node n;
  n.value = std::move(value);
  n.needs_grad = needs_grad;
  if (needs_grad) n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Tape::Node& Tape::node(Var v) {
  if (v.id < 0 || v.id >= static_cast<int>(nodes_.size())) throw Error("variable is not on this tape");
  return nodes_[v.id];
}

const Tape::Node& Tape::node(Var v) const {
  if (v.id < 0 || v.id >= static_cast<int>(nodes_.size())) throw Error("variable is not on this tape");
  return nodes_[v.id];
}

Matrix& Tape::grad_of(int id) {
  Node& n = nodes_[id];
  if (n.grad.size() == 0) n.grad = Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

Var Tape::param(std::string_view name) { return param(store_->index_of(name)); }

Var Tape::param(int index) {
  if (index < 0 || index >= static_cast<int>(store_->size())) throw Error("parameter index out of range");
  if (static_cast<int>(param_nodes_.size()) <= index) param_nodes_.resize(store_->size(), -1);
  if (param_nodes_[index] >= 0) return Var{param_nodes_[index]};
  Var v = push(store_->at(index).value, true, nullptr);
  nodes_[v.id].param = index;
  param_nodes_[index] = v.id;
  return v;
}

Var Tape::constant(Matrix value) { return push(std::move(value), false, nullptr); }

Var Tape::linear(Var x, Var weight, Var bias) {
  const Matrix& xv = node(x).value;
  const Matrix& wv = node(weight).value;
  const Matrix& bv = node(bias).value;
  if (xv.cols() != wv.rows() || bv.rows() != 1 || bv.cols() != wv.cols()) {
    throw Error("linear layer width mismatch: input " + std::to_string(xv.cols()) + ", weight " +
                std::to_string(wv.rows()) + "x" + std::to_string(wv.cols()));
  }
  Matrix y(xv.rows(), wv.cols());
  y.noalias() = xv * wv;
  y.rowwise() += bv.row(0);
  const bool ng = needs(x) || needs(weight) || needs(bias);
  return push(std::move(y), ng, [x, weight, bias](Tape& t, int self) {
    const Matrix& g = t.nodes_[self].grad;
    if (t.needs(x)) t.grad_of(x.id).noalias() += g * t.nodes_[weight.id].value.transpose();
    if (t.needs(weight)) t.grad_of(weight.id).noalias() += t.nodes_[x.id].value.transpose() * g;
    if (t.needs(bias)) t.grad_of(bias.id) += g.colwise().sum();
  });
}

void Tape::fold(std::uint64_t v) { branches_ = mix_seed(branches_, v); }

Var Tape::relu(Var x) {
  Matrix y = node(x).value.cwiseMax(0.0);
  if (track_branches_) {
    for (Eigen::Index i = 0; i < y.size(); ++i) fold(y.data()[i] > 0.0);
  }
  return push(std::move(y), needs(x), [x](Tape& t, int self) {
    const Node& n = t.nodes_[self];
    t.grad_of(x.id).array() += (n.value.array() > 0.0).select(n.grad.array(), 0.0);
  });
}

Var Tape::concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw Error("concat of nothing");
  const Eigen::Index rows = node(parts[0]).value.rows();
  Eigen::Index cols = 0;
  bool ng = false;
  for (Var p : parts) {
    if (node(p).value.rows() != rows) throw Error("concat row count mismatch");
    cols += node(p).value.cols();
    ng = ng || needs(p);
  }
  Matrix y(rows, cols);
  Eigen::Index at = 0;
  for (Var p : parts) {
    const Matrix& v = node(p).value;
    y.middleCols(at, v.cols()) = v;
    at += v.cols();
  }
  std::vector<Var> ins(parts.begin(), parts.end());
  return push(std::move(y), ng, [ins](Tape& t, int self) {
    Eigen::Index at = 0;
    for (Var p : ins) {
      const Eigen::Index c = t.nodes_[p.id].value.cols();
      if (t.needs(p)) t.grad_of(p.id) += t.nodes_[self].grad.middleCols(at, c);
      at += c;
    }
  });
}

Var Tape::slice_cols(Var x, int start, int count) {
  const Matrix& v = node(x).value;
  if (start < 0 || count < 0 || start + count > v.cols()) throw Error("column slice out of range");
  Matrix y = v.middleCols(start, count);
  return push(std::move(y), needs(x), [x, start, count](Tape& t, int self) {
    t.grad_of(x.id).middleCols(start, count) += t.nodes_[self].grad;
  });
}

Var Tape::rows(Var x, RowMapPtr map) {
  Matrix y;
  map->apply(node(x).value, y);
  return push(std::move(y), needs(x), [x, map](Tape& t, int self) {
    map->apply_transpose_add(t.nodes_[self].grad, t.grad_of(x.id));
  });
}

Var Tape::group_max(Var x, int group) {
  const Matrix& v = node(x).value;
  if (group < 1 || v.rows() % group != 0) throw Error("group_max: rows not divisible by group");
  const Eigen::Index groups = v.rows() / group;
  const Eigen::Index cols = v.cols();
  Matrix y(groups, cols);
  auto arg = std::make_shared<std::vector<int>>(groups * cols);
  for (Eigen::Index g = 0; g < groups; ++g) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      Eigen::Index best = g * group;
      double best_v = v(best, c);
      for (Eigen::Index r = best + 1; r < (g + 1) * group; ++r) {
        if (v(r, c) > best_v) {
          best_v = v(r, c);
          best = r;
        }
      }
      y(g, c) = best_v;
      (*arg)[g * cols + c] = static_cast<int>(best);
      if (track_branches_) fold(static_cast<std::uint64_t>(best));
    }
  }
  return push(std::move(y), needs(x), [x, arg, cols](Tape& t, int self) {
    const Matrix& g = t.nodes_[self].grad;
    Matrix& gx = t.grad_of(x.id);
    for (Eigen::Index r = 0; r < g.rows(); ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) gx((*arg)[r * cols + c], c) += g(r, c);
    }
  });
}

Var Tape::add(Var a, Var b) {
  const Matrix& av = node(a).value;
  const Matrix& bv = node(b).value;
  if (av.rows() != bv.rows() || av.cols() != bv.cols()) throw Error("add shape mismatch");
  Matrix y = av + bv;
  return push(std::move(y), needs(a) || needs(b), [a, b](Tape& t, int self) {
    if (t.needs(a)) t.grad_of(a.id) += t.nodes_[self].grad;
    if (t.needs(b)) t.grad_of(b.id) += t.nodes_[self].grad;
  });
}

Var Tape::sub(Var a, Var b) {
  const Matrix& av = node(a).value;
  const Matrix& bv = node(b).value;
  if (av.rows() != bv.rows() || av.cols() != bv.cols()) throw Error("sub shape mismatch");
  Matrix y = av - bv;
  return push(std::move(y), needs(a) || needs(b), [a, b](Tape& t, int self) {
    if (t.needs(a)) t.grad_of(a.id) += t.nodes_[self].grad;
    if (t.needs(b)) t.grad_of(b.id) -= t.nodes_[self].grad;
  });
}

Var Tape::add_constant(Var x, const Matrix& c) {
  const Matrix& v = node(x).value;
  if (v.rows() != c.rows() || v.cols() != c.cols()) throw Error("add_constant shape mismatch");
  Matrix y = v + c;
  return push(std::move(y), needs(x), [x](Tape& t, int self) {
    t.grad_of(x.id) += t.nodes_[self].grad;
  });
}

Var Tape::scale(Var x, double s) {
  Matrix y = s * node(x).value;
  return push(std::move(y), needs(x), [x, s](Tape& t, int self) {
    t.grad_of(x.id) += s * t.nodes_[self].grad;
  });
}

Var Tape::rotate_rows(Var x, std::shared_ptr<const std::vector<Mat3>> rotations) {
  const Matrix& v = node(x).value;
  if (v.cols() != 3 || static_cast<std::size_t>(v.rows()) != rotations->size()) {
    throw Error("rotate_rows expects one 3-vector per rotation");
  }
  Matrix y(v.rows(), 3);
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    const Vec3 r = v.row(i).transpose();
    y.row(i) = ((*rotations)[i] * r).transpose();
  }
  return push(std::move(y), needs(x), [x, rotations](Tape& t, int self) {
    const Matrix& g = t.nodes_[self].grad;
    Matrix& gx = t.grad_of(x.id);
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      const Vec3 gi = g.row(i).transpose();
      gx.row(i) += ((*rotations)[i].transpose() * gi).transpose();
    }
  });
}

Var Tape::normalize_rows(Var x) {
  constexpr double kEps = 1e-12;
  const Matrix& v = node(x).value;
  Eigen::VectorXd len = v.rowwise().norm().cwiseMax(kEps);
  Matrix y = v.array().colwise() / len.array();
  auto lens = std::make_shared<Eigen::VectorXd>(std::move(len));
  return push(std::move(y), needs(x), [x, lens](Tape& t, int self) {
    const Node& n = t.nodes_[self];
    Matrix& gx = t.grad_of(x.id);
    for (Eigen::Index i = 0; i < n.value.rows(); ++i) {
      const double d = n.value.row(i).dot(n.grad.row(i));
      gx.row(i) += (n.grad.row(i) - d * n.value.row(i)) / (*lens)(i);
    }
  });
}

Var Tape::mean_squared_norm(Var x) {
  const Matrix& v = node(x).value;
  if (v.rows() == 0) throw Error("mean of an empty set");
  Matrix y(1, 1);
  y(0, 0) = v.squaredNorm() / static_cast<double>(v.rows());
  return push(std::move(y), needs(x), [x](Tape& t, int self) {
    const double g = t.nodes_[self].grad(0, 0);
    const Matrix& xv = t.nodes_[x.id].value;
    t.grad_of(x.id) += (2.0 * g / static_cast<double>(xv.rows())) * xv;
  });
}

Var Tape::mean_abs_diff(Var x, const Matrix& target) {
  const Matrix& v = node(x).value;
  if (v.rows() != target.rows() || v.cols() != target.cols()) throw Error("mean_abs_diff shape mismatch");
  if (v.rows() == 0) throw Error("mean of an empty set");
  Matrix diff = v - target;
  Matrix y(1, 1);
  y(0, 0) = diff.cwiseAbs().sum() / static_cast<double>(v.rows());
  auto sign = std::make_shared<Matrix>(diff.array().sign().matrix());
  if (track_branches_) {
    for (Eigen::Index i = 0; i < sign->size(); ++i) fold(static_cast<std::uint64_t>(sign->data()[i] + 1.0));
  }
  return push(std::move(y), needs(x), [x, sign](Tape& t, int self) {
    const double g = t.nodes_[self].grad(0, 0);
    t.grad_of(x.id) += (g / static_cast<double>(sign->rows())) * (*sign);
  });
}

Var Tape::chamfer(Var x, const KdTree& target, std::vector<int>* nn_x_in_target) {
  const Matrix& v = node(x).value;
  if (v.cols() != 3) throw Error("chamfer expects 3D points");
  if (v.rows() == 0 || target.size() == 0) throw Error("chamfer distance of an empty point cloud");
  std::vector<Vec3> pts(v.rows());
  for (Eigen::Index i = 0; i < v.rows(); ++i) pts[i] = v.row(i).transpose();
  const KdTree pred_tree(pts);
  const auto& tp = target.points();
  const auto terms = parallel::chamfer_terms(pts, pred_tree, tp, target);

  const auto m = static_cast<double>(pts.size());
  const auto ns = static_cast<double>(tp.size());
  // d/dx_i = 2/M (x_i - t_nn(i)) + 2/Ns sum_{j: nn(j) = i} (x_i - t_j)
  auto coef = std::make_shared<Eigen::VectorXd>(Eigen::VectorXd::Constant(v.rows(), 2.0 / m));
  auto offset = std::make_shared<Matrix>(Matrix::Zero(v.rows(), 3));
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    offset->row(i) = (2.0 / m) * tp[terms.nn_a_in_b[i]].transpose();
  }
  for (std::size_t j = 0; j < tp.size(); ++j) {
    const int i = terms.nn_b_in_a[j];
    (*coef)(i) += 2.0 / ns;
    offset->row(i) += (2.0 / ns) * tp[j].transpose();
  }
  if (nn_x_in_target) *nn_x_in_target = terms.nn_a_in_b;
  if (track_branches_) {
    for (int i : terms.nn_a_in_b) fold(static_cast<std::uint64_t>(i));
    for (int i : terms.nn_b_in_a) fold(static_cast<std::uint64_t>(i));
  }
  Matrix y(1, 1);
  y(0, 0) = terms.total();
  return push(std::move(y), needs(x), [x, coef, offset](Tape& t, int self) {
    const double g = t.nodes_[self].grad(0, 0);
    const Matrix& xv = t.nodes_[x.id].value;
    Matrix& gx = t.grad_of(x.id);
    gx += g * (xv.array().colwise() * coef->array()).matrix();
    gx -= g * (*offset);
  });
}

Var Tape::weighted_sum(std::span<const std::pair<double, Var>> terms) {
  Matrix y = Matrix::Zero(1, 1);
  bool ng = false;
  for (const auto& [w, v] : terms) {
    const Matrix& val = node(v).value;
    if (val.rows() != 1 || val.cols() != 1) throw Error("weighted_sum expects scalars");
    y(0, 0) += w * val(0, 0);
    ng = ng || needs(v);
  }
  std::vector<std::pair<double, Var>> copy(terms.begin(), terms.end());
  return push(std::move(y), ng, [copy](Tape& t, int self) {
    const double g = t.nodes_[self].grad(0, 0);
    for (const auto& [w, v] : copy) {
      if (t.needs(v)) t.grad_of(v.id)(0, 0) += w * g;
    }
  });
}

const Matrix& Tape::value(Var v) const { return node(v).value; }

double Tape::scalar(Var v) const {
  const Matrix& m = node(v).value;
  if (m.rows() != 1 || m.cols() != 1) throw Error("variable is not a scalar");
  return m(0, 0);
}

Matrix Tape::grad(Var v) const {
  const Node& n = node(v);
  if (n.grad.size() == 0) return Matrix::Zero(n.value.rows(), n.value.cols());
  return n.grad;
}

void Tape::backward(Var loss, ParameterStore& grads) {
  if (nodes_.empty() || !loss.valid() || loss.id >= static_cast<int>(nodes_.size())) {
    throw Error("backward called without a recorded forward pass");
  }
  if (&grads != store_) throw Error("backward target is not the store this tape reads from");
  if (backward_done_) throw Error("backward already ran on this tape");
  const Node& l = nodes_[loss.id];
  if (l.value.rows() != 1 || l.value.cols() != 1) throw Error("loss must be a scalar");
  backward_done_ = true;
  if (!l.needs_grad) return;
  grad_of(loss.id)(0, 0) = 1.0;
  for (int id = loss.id; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.needs_grad || n.grad.size() == 0) continue;
    if (n.param >= 0) {
      grads.at(n.param).grad += n.grad;
    } else if (n.back) {
      n.back(*this, id);
    }
  }
}

}  // namespace surfcloth::net
