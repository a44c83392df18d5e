// Copyright 2026 The nilmkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "nilm/kernels.hpp"

namespace {

std::vector<double> random_values(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

template <auto Kernel>
void BM_MatmulNN(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_values(n * n, 1);
  const auto b = random_values(n * n, 2);
  std::vector<double> c(n * n);
  for (auto _ : state) {
    Kernel(a, b, c, n, n, n, false);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(2 * n * n * n));
}

template <auto Kernel>
void BM_MatmulTN(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_values(n * n, 3);
  const auto b = random_values(n * n, 4);
  std::vector<double> c(n * n);
  for (auto _ : state) {
    Kernel(a, b, c, n, n, n, false);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(2 * n * n * n));
}

template <auto Kernel>
void BM_Im2col(benchmark::State& state) {
  nilm::kernels::ConvGeometry g;
  g.batch = 64;
  g.length = static_cast<std::size_t>(state.range(0));
  g.channels = 16;
  g.filter_size = 4;
  g.out_length = g.length - 3;
  const auto input = random_values(g.batch * g.length * g.channels, 5);
  std::vector<double> cols(g.rows() * g.patch());
  for (auto _ : state) {
    Kernel(input, g, cols);
    benchmark::DoNotOptimize(cols.data());
  }
}

template <auto Kernel>
void BM_NearestTotal(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto targets = random_values(n, 6);
  auto totals = random_values(729, 7);
  std::sort(totals.begin(), totals.end());
  std::vector<std::size_t> chosen(n);
  for (auto _ : state) {
    Kernel(targets, totals, chosen);
    benchmark::DoNotOptimize(chosen.data());
  }
}

namespace serial = nilm::kernels::serial;
namespace parallel = nilm::kernels::parallel;

BENCHMARK(BM_MatmulNN<serial::matmul_nn>)->Name("matmul_nn/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_MatmulNN<parallel::matmul_nn>)->Name("matmul_nn/parallel")->Arg(64)->Arg(256);
BENCHMARK(BM_MatmulTN<serial::matmul_tn>)->Name("matmul_tn/serial")->Arg(64)->Arg(256);
BENCHMARK(BM_MatmulTN<parallel::matmul_tn>)->Name("matmul_tn/parallel")->Arg(64)->Arg(256);
BENCHMARK(BM_Im2col<serial::im2col>)->Name("im2col/serial")->Arg(128)->Arg(512);
BENCHMARK(BM_Im2col<parallel::im2col>)->Name("im2col/parallel")->Arg(128)->Arg(512);
BENCHMARK(BM_NearestTotal<serial::nearest_total>)->Name("nearest_total/serial")->Arg(20000);
BENCHMARK(BM_NearestTotal<parallel::nearest_total>)->Name("nearest_total/parallel")->Arg(20000);

}  // namespace

BENCHMARK_MAIN();
