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

// OpenMP kernels. Per-query work runs in parallel and writes to its own
// slot; reductions are done afterwards in index order so results match the
// serial reference bit for bit.

#include <limits>
#include <string>

#include "surfcloth/geom/kernels.hpp"

namespace surfcloth::parallel {

std::vector<Neighbor> nearest_neighbors(std::span<const Vec3> queries, const KdTree& target) {
  if (target.size() == 0) throw Error("nearest neighbor query on an empty point set");
  const auto n = static_cast<std::ptrdiff_t>(queries.size());
  std::vector<Neighbor> out(queries.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = target.nearest(queries[i]);
  return out;
}

std::vector<std::vector<Neighbor>> knn(std::span<const Vec3> queries, const KdTree& target, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > target.size()) {
    throw Error("k out of range for knn query");
  }
  const auto n = static_cast<std::ptrdiff_t>(queries.size());
  std::vector<std::vector<Neighbor>> out(queries.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = target.knn(queries[i], k);
  return out;
}

ChamferTerms chamfer_terms(std::span<const Vec3> a, const KdTree& a_tree, std::span<const Vec3> b,
                           const KdTree& b_tree) {
  if (a.empty() || b.empty()) throw Error("chamfer distance of an empty point cloud");
  const auto ab = nearest_neighbors(a, b_tree);
  const auto ba = nearest_neighbors(b, a_tree);
  ChamferTerms terms;
  terms.nn_a_in_b.resize(a.size());
  terms.nn_b_in_a.resize(b.size());
  double sum_a = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    terms.nn_a_in_b[i] = ab[i].index;
    sum_a += ab[i].sq_distance;
  }
  double sum_b = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    terms.nn_b_in_a[j] = ba[j].index;
    sum_b += ba[j].sq_distance;
  }
  terms.a_to_b = sum_a / static_cast<double>(a.size());
  terms.b_to_a = sum_b / static_cast<double>(b.size());
  return terms;
}

ChamferTerms chamfer_terms(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.empty() || b.empty()) throw Error("chamfer distance of an empty point cloud");
  const KdTree a_tree({a.begin(), a.end()});
  const KdTree b_tree({b.begin(), b.end()});
  return chamfer_terms(a, a_tree, b, b_tree);
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
  min_d[last] = -1.0;
  while (static_cast<int>(picked.size()) < k) {
    int best = -1;
    double best_d = -1.0;
#pragma omp parallel
    {
      int local = -1;
      double local_d = -1.0;
#pragma omp for schedule(static) nowait
      for (int i = 0; i < n; ++i) {
        if (min_d[i] < 0.0) continue;
        const double d = squared_distance(points[i], points[last]);
        if (d < min_d[i]) min_d[i] = d;
        if (min_d[i] > local_d) {
          local_d = min_d[i];
          local = i;
        }
      }
#pragma omp critical
      {
        // total order: larger distance first, lower index on ties
        if (local >= 0 && (local_d > best_d || (local_d == best_d && local < best))) {
          best_d = local_d;
          best = local;
        }
      }
    }
    last = best;
    picked.push_back(last);
    min_d[last] = -1.0;
  }
  return picked;
}

}  // namespace surfcloth::parallel
