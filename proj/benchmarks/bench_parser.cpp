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

#include "fusion_eval/llm_client.hpp"
#include "fusion_eval/response_parser.hpp"

namespace {

fusion_eval::FusionVerdict sample_verdict() {
  fusion_eval::FusionVerdict v;
  v.coherence = {4, "The summary follows the order of the article and each sentence builds on the last."};
  v.consistency = {4.5, "All claims are supported, although the cost figure is rounded."};
  v.relevance = {3, "It leaves out the construction timeline, which is central to the story."};
  v.fluency = {5, "Grammatical and easy to read."};
  v.overall = {4.125, "A faithful, readable summary that misses one key detail."};
  return v;
}

void BM_ParseCanonical(benchmark::State& state) {
  const auto text = fusion_eval::emit_canonical(sample_verdict());
  for (auto _ : state) benchmark::DoNotOptimize(fusion_eval::parse_verdict(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseCanonical);

void BM_ParseMarkup(benchmark::State& state) {
  const std::string text =
      "Sure! Here is my evaluation.\n\n**Criterias' Scores and Explanations:**\n\n"
      "**Coherence (1-5):** 4/5\nThe summary follows the article.\n\n"
      "### Consistency\n**Score:** 4.5\n**Explanation:** Supported claims.\n\n"
      "- Relevance: Score: 3 Explanation: Misses the timeline.\n\n"
      "FLUENCY\nScore: 5 Explanation: Clean.\n\n"
      "## Evaluation Summary\nOverall Score: 4.125\nExplanation: Good overall.\n";
  for (auto _ : state) benchmark::DoNotOptimize(fusion_eval::parse_verdict(text));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseMarkup);

void BM_EmitCanonical(benchmark::State& state) {
  const auto v = sample_verdict();
  for (auto _ : state) benchmark::DoNotOptimize(fusion_eval::emit_canonical(v));
}
BENCHMARK(BM_EmitCanonical);

}  // namespace
