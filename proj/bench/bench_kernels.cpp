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

// Serial reference kernels against their accelerated counterparts.
//
//   ./bench_kernels --benchmark_filter=Chamfer

#include <benchmark/benchmark.h>

#include <vector>

#include "surfcloth/geom/kernels.hpp"
#include "surfcloth/random.hpp"

namespace surfcloth {
namespace {

std::vector<Vec3> cloud(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec3> p(n);
  for (auto& v : p) v = Vec3(rng.normal(), rng.normal(), rng.normal());
  return p;
}

void BM_NearestSerial(benchmark::State& state) {
  const auto q = cloud(static_cast<int>(state.range(0)), 1);
  const auto t = cloud(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(serial::nearest_neighbors(q, t));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NearestSerial)->Arg(1024)->Arg(4096);

void BM_NearestKdTree(benchmark::State& state) {
  const auto q = cloud(static_cast<int>(state.range(0)), 1);
  const KdTree tree(cloud(static_cast<int>(state.range(0)), 2));
  for (auto _ : state) benchmark::DoNotOptimize(parallel::nearest_neighbors(q, tree));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NearestKdTree)->Arg(1024)->Arg(4096)->Arg(16384);

void BM_KdTreeBuild(benchmark::State& state) {
  const auto p = cloud(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(KdTree(p));
}
BENCHMARK(BM_KdTreeBuild)->Arg(4096)->Arg(16384);

void BM_ChamferSerial(benchmark::State& state) {
  const auto a = cloud(static_cast<int>(state.range(0)), 4);
  const auto b = cloud(static_cast<int>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(serial::chamfer_terms(a, b));
}
BENCHMARK(BM_ChamferSerial)->Arg(1024)->Arg(4096);

void BM_ChamferParallel(benchmark::State& state) {
  const auto a = cloud(static_cast<int>(state.range(0)), 4);
  const auto b = cloud(static_cast<int>(state.range(0)), 5);
  for (auto _ : state) benchmark::DoNotOptimize(parallel::chamfer_terms(a, b));
}
BENCHMARK(BM_ChamferParallel)->Arg(1024)->Arg(4096)->Arg(16384);

void BM_KnnSerial(benchmark::State& state) {
  const auto q = cloud(512, 6);
  const auto t = cloud(static_cast<int>(state.range(0)), 7);
  for (auto _ : state) {
    for (const Vec3& v : q) benchmark::DoNotOptimize(serial::knn(v, t, 16));
  }
}
BENCHMARK(BM_KnnSerial)->Arg(2048);

void BM_KnnKdTree(benchmark::State& state) {
  const auto q = cloud(512, 6);
  const KdTree tree(cloud(static_cast<int>(state.range(0)), 7));
  for (auto _ : state) benchmark::DoNotOptimize(parallel::knn(q, tree, 16));
}
BENCHMARK(BM_KnnKdTree)->Arg(2048);

void BM_FpsSerial(benchmark::State& state) {
  const auto p = cloud(static_cast<int>(state.range(0)), 8);
  for (auto _ : state) benchmark::DoNotOptimize(serial::farthest_point_sample(p, 512));
}
BENCHMARK(BM_FpsSerial)->Arg(1050)->Arg(6890);

void BM_FpsParallel(benchmark::State& state) {
  const auto p = cloud(static_cast<int>(state.range(0)), 8);
  for (auto _ : state) benchmark::DoNotOptimize(parallel::farthest_point_sample(p, 512));
}
BENCHMARK(BM_FpsParallel)->Arg(1050)->Arg(6890);

}  // namespace
}  // namespace surfcloth

BENCHMARK_MAIN();
