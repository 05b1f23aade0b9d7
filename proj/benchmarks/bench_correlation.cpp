// Copyright 2026 The fusion_eval Authors.
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

#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "fusion_eval/meta_eval.hpp"

namespace {

std::vector<double> sample(std::size_t n, std::uint64_t seed, int levels) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> level(1, levels);
  std::vector<double> v(n);
  for (auto& x : v) x = level(rng);
  return v;
}

void BM_Spearman(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = sample(n, 1, 1000), y = sample(n, 2, 9);
  for (auto _ : state) benchmark::DoNotOptimize(fusion_eval::spearman(x, y));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Spearman)->RangeMultiplier(4)->Range(16, 1 << 16)->Complexity();

void BM_KendallTauB(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = sample(n, 3, 1000), y = sample(n, 4, 9);
  for (auto _ : state) benchmark::DoNotOptimize(fusion_eval::kendall_tau_b(x, y));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KendallTauB)->RangeMultiplier(4)->Range(16, 1 << 16)->Complexity();

// SummEval shape: 100 documents x 16 systems.
void BM_SummaryLevel(benchmark::State& state) {
  fusion_eval::ScoreMatrix matrix;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> rating(3, 15);
  for (int d = 0; d < 100; ++d) {
    for (int s = 0; s < 16; ++s) {
      matrix.add("doc" + std::to_string(d), "M" + std::to_string(s), unit(rng), rating(rng) / 3.0);
    }
  }
  const auto stat = state.range(0) == 0 ? fusion_eval::CorrelationStat::kSpearman
                                        : fusion_eval::CorrelationStat::kKendall;
  for (auto _ : state) benchmark::DoNotOptimize(fusion_eval::summary_level(matrix, stat));
}
BENCHMARK(BM_SummaryLevel)->Arg(0)->Arg(1);

}  // namespace
