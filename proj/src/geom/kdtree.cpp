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

#include <algorithm>
#include <numeric>

#include "surfcloth/geom/kernels.hpp"

namespace surfcloth {

KdTree::KdTree(std::vector<Vec3> points, int leaf_size)
    : points_(std::move(points)), leaf_size_(std::max(1, leaf_size)) {
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0);
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / leaf_size_ + 2);
    build(0, static_cast<int>(points_.size()), 0);
  }
}

int KdTree::build(int begin, int end, int depth) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({begin, end, -1, 0.0, -1, -1});
  if (end - begin <= leaf_size_) return id;

  Vec3 lo = points_[order_[begin]];
  Vec3 hi = lo;
  for (int i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi[axis] == lo[axis]) return id;  // all points coincide

  const int mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](int a, int b) {
                     const double ca = points_[a][axis];
                     const double cb = points_[b][axis];
                     return ca < cb || (ca == cb && a < b);
                   });
  const double split = points_[order_[mid]][axis];
  const int left = build(begin, mid, depth + 1);
  const int right = build(mid, end, depth + 1);
  Node& node = nodes_[id];
  node.axis = axis;
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

void KdTree::search_nearest(int node_id, const Vec3& q, Neighbor& best) const {
  const Node& node = nodes_[node_id];
  if (node.axis < 0) {
    for (int i = node.begin; i < node.end; ++i) {
      const int idx = order_[i];
      const double d = squared_distance(q, points_[idx]);
      if (best.index < 0 || closer(d, idx, best.sq_distance, best.index)) best = {idx, d};
    }
    return;
  }
  const double diff = q[node.axis] - node.split;
  const int near = diff < 0.0 ? node.left : node.right;
  const int far = diff < 0.0 ? node.right : node.left;
  search_nearest(near, q, best);
  // <= keeps equal-distance candidates reachable for the index tie break
  if (diff * diff <= best.sq_distance) search_nearest(far, q, best);
}

Neighbor KdTree::nearest(const Vec3& query) const {
  if (points_.empty()) throw Error("nearest neighbor query on an empty point set");
  Neighbor best;
  search_nearest(0, query, best);
  return best;
}

void KdTree::search_knn(int node_id, const Vec3& q, int k, std::vector<Neighbor>& best) const {
  const Node& node = nodes_[node_id];
  if (node.axis < 0) {
    for (int i = node.begin; i < node.end; ++i) {
      const int idx = order_[i];
      const double d = squared_distance(q, points_[idx]);
      if (static_cast<int>(best.size()) == k &&
          !closer(d, idx, best.back().sq_distance, best.back().index)) {
        continue;
      }
      auto pos = std::upper_bound(best.begin(), best.end(), Neighbor{idx, d},
                                  [](const Neighbor& a, const Neighbor& b) {
                                    return closer(a.sq_distance, a.index, b.sq_distance, b.index);
                                  });
      best.insert(pos, {idx, d});
      if (static_cast<int>(best.size()) > k) best.pop_back();
    }
    return;
  }
  const double diff = q[node.axis] - node.split;
  const int near = diff < 0.0 ? node.left : node.right;
  const int far = diff < 0.0 ? node.right : node.left;
  search_knn(near, q, k, best);
  if (static_cast<int>(best.size()) < k || diff * diff <= best.back().sq_distance) {
    search_knn(far, q, k, best);
  }
}

std::vector<Neighbor> KdTree::knn(const Vec3& query, int k) const {
  if (points_.empty()) throw Error("nearest neighbor query on an empty point set");
  if (k < 1 || static_cast<std::size_t>(k) > points_.size()) {
    throw Error("k out of range for knn query");
  }
  std::vector<Neighbor> best;
  best.reserve(k + 1);
  search_knn(0, query, k, best);
  return best;
}

}  // namespace surfcloth
