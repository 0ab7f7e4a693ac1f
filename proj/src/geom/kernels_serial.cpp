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

// Serial reference kernels: exhaustive loops with no acceleration
// structures. Used by the tests as oracles and by the benchmarks as baseline.

#include <algorithm>
#include <limits>
#include <string>

#include "surfcloth/geom/kernels.hpp"

namespace surfcloth::serial {

Neighbor nearest_neighbor(const Vec3& query, std::span<const Vec3> target) {
  if (target.empty()) throw Error("nearest neighbor query on an empty point set");
  Neighbor best{0, squared_distance(query, target[0])};
  for (int i = 1; i < static_cast<int>(target.size()); ++i) {
    const double d = squared_distance(query, target[i]);
    if (d < best.sq_distance) best = {i, d};
  }
  return best;
}

std::vector<Neighbor> knn(const Vec3& query, std::span<const Vec3> target, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > target.size()) {
    throw Error("k out of range for knn query");
  }
  std::vector<Neighbor> all(target.size());
  for (int i = 0; i < static_cast<int>(target.size()); ++i) {
    all[i] = {i, squared_distance(query, target[i])};
  }
  std::stable_sort(all.begin(), all.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.sq_distance < b.sq_distance;
  });
  all.resize(k);
  return all;
}

std::vector<Neighbor> nearest_neighbors(std::span<const Vec3> queries,
                                        std::span<const Vec3> target) {
  std::vector<Neighbor> out(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) out[i] = nearest_neighbor(queries[i], target);
  return out;
}

ChamferTerms chamfer_terms(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.empty() || b.empty()) throw Error("chamfer distance of an empty point cloud");
  ChamferTerms terms;
  terms.nn_a_in_b.resize(a.size());
  terms.nn_b_in_a.resize(b.size());
  double sum_a = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const Neighbor n = nearest_neighbor(a[i], b);
    terms.nn_a_in_b[i] = n.index;
    sum_a += n.sq_distance;
  }
  double sum_b = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    const Neighbor n = nearest_neighbor(b[j], a);
    terms.nn_b_in_a[j] = n.index;
    sum_b += n.sq_distance;
  }
  terms.a_to_b = sum_a / static_cast<double>(a.size());
  terms.b_to_a = sum_b / static_cast<double>(b.size());
  return terms;
}

std::vector<int> farthest_point_sample(std::span<const Vec3> points, int k) {
  const int n = static_cast<int>(points.size());
  if (k < 1 || k > n) {
    throw Error("farthest point sample size " + std::to_string(k) + " out of range [1, " +
                std::to_string(n) + "]");
  }
  std::vector<int> picked;
  picked.reserve(k);
  std::vector<double> min_d(n, std::numeric_limits<double>::infinity());
  int last = 0;
  picked.push_back(last);
  min_d[last] = -1.0;  // selected points are marked negative
  while (static_cast<int>(picked.size()) < k) {
    int best = -1;
    double best_d = -1.0;
    for (int i = 0; i < n; ++i) {
      if (min_d[i] < 0.0) continue;
      min_d[i] = std::min(min_d[i], squared_distance(points[i], points[last]));
      if (min_d[i] > best_d) {
        best_d = min_d[i];
        best = i;
      }
    }
    last = best;
    picked.push_back(last);
    min_d[last] = -1.0;
  }
  return picked;
}

}  // namespace surfcloth::serial
