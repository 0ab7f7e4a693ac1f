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

#include <cstring>

#include "surfcloth/geom/kernels.hpp"
#include "surfcloth/random.hpp"

namespace surfcloth {

Neighbor nearest_neighbor(const Vec3& query, const PointCloud& target) {
  if (target.empty()) throw Error("nearest neighbor query on an empty point set");
  return serial::nearest_neighbor(query, target.positions);
}

double chamfer(const PointCloud& a, const PointCloud& b) {
  return parallel::chamfer_terms(a.positions, b.positions).total();
}

std::vector<int> farthest_point_sample(std::span<const Vec3> points, int k) {
  return parallel::farthest_point_sample(points, k);
}

namespace {

std::uint64_t hash_points(std::span<const Vec3> points) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const Vec3& p : points) {
    for (int c = 0; c < 3; ++c) {
      std::uint64_t bits = 0;
      const double v = p[c];
      std::memcpy(&bits, &v, sizeof bits);
      h = mix_seed(h, bits);
    }
  }
  return h;
}

}  // namespace

const std::vector<int>& FpsCache::get(std::span<const Vec3> points, int k) {
  const std::uint64_t h = hash_points(points);
  for (const Entry& e : entries_) {
    if (e.hash == h && e.count == points.size() && e.k == k) return e.indices;
  }
  ++misses_;
  entries_.push_back({h, points.size(), k, farthest_point_sample(points, k)});
  return entries_.back().indices;
}

}  // namespace surfcloth
