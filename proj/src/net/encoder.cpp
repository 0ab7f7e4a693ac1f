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

#include "surfcloth/net/encoder.hpp"

#include <algorithm>
#include <bit>

namespace surfcloth::net {

void EncoderConfig::validate(int vertex_count) const {
  if (abstraction_counts.empty()) throw Error("encoder needs at least one abstraction level");
  if (widths.size() != abstraction_counts.size()) {
    throw Error("encoder widths must have one entry per abstraction level");
  }
  int previous = vertex_count;
  for (std::size_t l = 0; l < abstraction_counts.size(); ++l) {
    const int c = abstraction_counts[l];
    if (c < 1) throw Error("abstraction count must be positive");
    if (c > previous || (l > 0 && c >= previous)) {
      throw Error("abstraction counts must be strictly decreasing and fit the point count");
    }
    previous = c;
  }
  for (int w : widths) {
    if (w < 1) throw Error("encoder layer width must be positive");
  }
  if (output_width < 1) throw Error("encoder output width must be positive");
  if (k < 1) throw Error("neighborhood size must be positive");
}

std::vector<int> EncoderConfig::default_counts(int vertex_count, int levels) {
  if (vertex_count < 2) throw Error("too few vertices for an encoder");
  int first = vertex_count >= 6890 ? 2048
                                   : std::min(512, static_cast<int>(std::bit_floor(
                                                       static_cast<unsigned>(vertex_count / 2))));
  std::vector<int> out;
  for (int l = 0; l < levels && first >= 1; ++l, first /= 2) out.push_back(first);
  return out;
}

RowMapPtr interpolation_map(std::span<const Vec3> source, std::span<const Vec3> target) {
  if (source.empty()) throw Error("interpolation from an empty point set");
  const KdTree tree(std::vector<Vec3>(source.begin(), source.end()));
  const int k = std::min<int>(3, static_cast<int>(source.size()));
  const auto nbrs = parallel::knn(target, tree, k);
  std::vector<std::vector<RowMap::Entry>> rows(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) {
    double total = 0.0;
    for (const Neighbor& n : nbrs[i]) total += 1.0 / (n.sq_distance + 1e-8);
    for (const Neighbor& n : nbrs[i]) rows[i].emplace_back(n.index, 1.0 / (n.sq_distance + 1e-8) / total);
  }
  return std::make_shared<const RowMap>(static_cast<int>(source.size()), rows);
}

std::shared_ptr<const EncoderTopology> build_topology(std::span<const Vec3> points,
                                                      const EncoderConfig& config,
                                                      FpsCache* cache) {
  config.validate(static_cast<int>(points.size()));
  auto topo = std::make_shared<EncoderTopology>();
  const int levels = static_cast<int>(config.abstraction_counts.size());
  topo->levels = levels;
  topo->positions.resize(levels + 1);
  topo->centers.resize(levels + 1);
  topo->group_size.assign(levels + 1, 0);
  topo->gather.resize(levels + 1);
  topo->relative.resize(levels + 1);
  topo->upsample.resize(levels + 1);
  topo->positions[0].assign(points.begin(), points.end());

  for (int l = 1; l <= levels; ++l) {
    const auto& prev = topo->positions[l - 1];
    const int count = config.abstraction_counts[l - 1];
    topo->centers[l] = cache ? cache->get(prev, count) : farthest_point_sample(prev, count);
    std::vector<Vec3> pos;
    pos.reserve(count);
    for (int c : topo->centers[l]) pos.push_back(prev[c]);

    const int group = std::min<int>(config.k, static_cast<int>(prev.size()));
    const KdTree tree(prev);
    const auto nbrs = parallel::knn(pos, tree, group);
    std::vector<std::vector<RowMap::Entry>> rows;
    rows.reserve(static_cast<std::size_t>(count) * group);
    Matrix rel(static_cast<Eigen::Index>(count) * group, 3);
    for (int c = 0; c < count; ++c) {
      for (int j = 0; j < group; ++j) {
        const int idx = nbrs[c][j].index;
        rows.push_back({{idx, 1.0}});
        rel.row(static_cast<Eigen::Index>(c) * group + j) = (prev[idx] - pos[c]).transpose();
      }
    }
    topo->group_size[l] = group;
    topo->gather[l] = std::make_shared<const RowMap>(static_cast<int>(prev.size()), rows);
    topo->relative[l] = std::move(rel);
    topo->upsample[l] = interpolation_map(pos, prev);
    topo->positions[l] = std::move(pos);
  }
  return topo;
}

PointEncoder::PointEncoder(std::string prefix, EncoderConfig config, int input_width,
                           std::shared_ptr<const EncoderTopology> topology)
    : prefix_(std::move(prefix)),
      config_(std::move(config)),
      input_width_(input_width),
      topology_(std::move(topology)) {
  if (input_width_ < 1) throw Error("encoder input width must be positive");
  if (!topology_ || topology_->levels != static_cast<int>(config_.abstraction_counts.size())) {
    throw Error("encoder topology does not match its config");
  }
  config_.validate(static_cast<int>(topology_->positions[0].size()));
}

int PointEncoder::propagation_width(int level) const {
  return level >= 1 ? config_.widths[level - 1] : config_.widths[0];
}

void PointEncoder::register_parameters(ParameterStore& store) const {
  const double he = std::sqrt(6.0);
  const int rel = config_.use_relative_positions ? 3 : 0;
  const int levels = topology_->levels;
  int width = input_width_;
  for (int l = 1; l <= levels; ++l) {
    const std::string p = prefix_ + "/sa" + std::to_string(l);
    store.add(p + "/w", width + rel, config_.widths[l - 1], Init::kFanInUniform, he);
    store.add(p + "/b", 1, config_.widths[l - 1], Init::kZero);
    width = config_.widths[l - 1];
  }
  for (int l = levels; l >= 1; --l) {
    const int skip = l - 1 >= 1 ? config_.widths[l - 2] : input_width_;
    const std::string p = prefix_ + "/fp" + std::to_string(l - 1);
    store.add(p + "/w", width + skip, propagation_width(l - 1), Init::kFanInUniform, he);
    store.add(p + "/b", 1, propagation_width(l - 1), Init::kZero);
    width = propagation_width(l - 1);
  }
  store.add(prefix_ + "/out/w", width, config_.output_width, Init::kFanInUniform, 1.0);
  store.add(prefix_ + "/out/b", 1, config_.output_width, Init::kZero);
}

Var PointEncoder::forward(Tape& tape, Var input) const {
  const auto& topo = *topology_;
  const Matrix& in = tape.value(input);
  if (in.rows() != static_cast<Eigen::Index>(topo.positions[0].size()) || in.cols() != input_width_) {
    throw Error("encoder input must be " + std::to_string(topo.positions[0].size()) + " x " +
                std::to_string(input_width_));
  }
  std::vector<Var> feats{input};
  for (int l = 1; l <= topo.levels; ++l) {
    const std::string p = prefix_ + "/sa" + std::to_string(l);
    Var grouped = tape.rows(feats.back(), topo.gather[l]);
    if (config_.use_relative_positions) {
      grouped = tape.concat_cols({grouped, tape.constant(topo.relative[l])});
    }
    Var h = tape.relu(tape.linear(grouped, tape.param(p + "/w"), tape.param(p + "/b")));
    feats.push_back(tape.group_max(h, topo.group_size[l]));
  }
  Var x = feats.back();
  for (int l = topo.levels; l >= 1; --l) {
    const std::string p = prefix_ + "/fp" + std::to_string(l - 1);
    Var up = tape.rows(x, topo.upsample[l]);
    Var cat = tape.concat_cols({up, feats[l - 1]});
    x = tape.relu(tape.linear(cat, tape.param(p + "/w"), tape.param(p + "/b")));
  }
  return tape.linear(x, tape.param(prefix_ + "/out/w"), tape.param(prefix_ + "/out/b"));
}

}  // namespace surfcloth::net
