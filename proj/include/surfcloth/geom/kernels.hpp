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

// Point-set kernels. Every kernel has a straightforward serial version in
// `serial::` kept as the reference for tests and benchmarks, and an
// accelerated OpenMP version in `parallel::`. The two agree bit for bit.

#include <cstdint>
#include <deque>
#include <span>
#include <utility>
#include <vector>

#include "surfcloth/geom/types.hpp"

namespace surfcloth {

struct Neighbor {
  int index = -1;
  double sq_distance = 0.0;
};

[[nodiscard]] inline double squared_distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  const double dz = a.z() - b.z();
  return dx * dx + dy * dy + dz * dz;
}

/// Ordering used by every nearest-neighbor search: distance, then index.
[[nodiscard]] inline bool closer(double d_a, int i_a, double d_b, int i_b) {
  return d_a < d_b || (d_a == d_b && i_a < i_b);
}

/// Static kd-tree over a point array. Exact: results equal brute force,
/// including the lowest-index tie break.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::vector<Vec3> points, int leaf_size = 8);

  [[nodiscard]] std::size_t size() const { return points_.size(); }
  [[nodiscard]] const std::vector<Vec3>& points() const { return points_; }

  [[nodiscard]] Neighbor nearest(const Vec3& query) const;
  /// k nearest in ascending (distance, index) order.
  [[nodiscard]] std::vector<Neighbor> knn(const Vec3& query, int k) const;

 private:
  struct Node {
    int begin = 0;
    int end = 0;
    int axis = -1;  // -1 for leaves
    double split = 0.0;
    int left = -1;
    int right = -1;
  };

  int build(int begin, int end, int depth);
  void search_nearest(int node, const Vec3& q, Neighbor& best) const;
  void search_knn(int node, const Vec3& q, int k, std::vector<Neighbor>& heap) const;

  std::vector<Vec3> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int leaf_size_ = 8;
};

/// Sum of the two mean squared nearest-neighbor distances between point sets.
struct ChamferTerms {
  double a_to_b = 0.0;  // mean over a of min distance to b
  double b_to_a = 0.0;
  std::vector<int> nn_a_in_b;  // for each point of a, nearest in b
  std::vector<int> nn_b_in_a;

  [[nodiscard]] double total() const { return a_to_b + b_to_a; }
};

namespace serial {

[[nodiscard]] Neighbor nearest_neighbor(const Vec3& query, std::span<const Vec3> target);
[[nodiscard]] std::vector<Neighbor> knn(const Vec3& query, std::span<const Vec3> target, int k);
[[nodiscard]] std::vector<Neighbor> nearest_neighbors(std::span<const Vec3> queries,
                                                      std::span<const Vec3> target);
[[nodiscard]] ChamferTerms chamfer_terms(std::span<const Vec3> a, std::span<const Vec3> b);
[[nodiscard]] std::vector<int> farthest_point_sample(std::span<const Vec3> points, int k);

}  // namespace serial

namespace parallel {

[[nodiscard]] std::vector<Neighbor> nearest_neighbors(std::span<const Vec3> queries,
                                                      const KdTree& target);
[[nodiscard]] std::vector<std::vector<Neighbor>> knn(std::span<const Vec3> queries,
                                                     const KdTree& target, int k);
[[nodiscard]] ChamferTerms chamfer_terms(std::span<const Vec3> a, std::span<const Vec3> b);
[[nodiscard]] ChamferTerms chamfer_terms(std::span<const Vec3> a, const KdTree& a_tree,
                                         std::span<const Vec3> b, const KdTree& b_tree);
[[nodiscard]] std::vector<int> farthest_point_sample(std::span<const Vec3> points, int k);

}  // namespace parallel

/// Exact nearest neighbor of a single query; throws on an empty target.
[[nodiscard]] Neighbor nearest_neighbor(const Vec3& query, const PointCloud& target);

/// Squared-distance Chamfer between two non-empty clouds.
[[nodiscard]] double chamfer(const PointCloud& a, const PointCloud& b);

/// Greedy max-min sampling starting at index 0.
[[nodiscard]] std::vector<int> farthest_point_sample(std::span<const Vec3> points, int k);

/// Memoizes farthest-point samples of constant point sets, keyed by content.
class FpsCache {
 public:
  [[nodiscard]] const std::vector<int>& get(std::span<const Vec3> points, int k);
  [[nodiscard]] std::size_t entries() const { return entries_.size(); }
  [[nodiscard]] std::size_t misses() const { return misses_; }

 private:
  struct Entry {
    std::uint64_t hash = 0;
    std::size_t count = 0;
    int k = 0;
    std::vector<int> indices;
  };
  std::deque<Entry> entries_;  // stable references
  std::size_t misses_ = 0;
};

}  // namespace surfcloth
