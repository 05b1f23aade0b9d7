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

#include "fusion_eval/prompt.hpp"

namespace {

void BM_RenderCanonical(benchmark::State& state) {
  fusion_eval::EvaluationExample ex;
  ex.doc_id = "d";
  ex.system_id = "M";
  ex.source.reserve(4000);
  while (ex.source.size() < 3500) ex.source += "The council approved the park plan on Tuesday. ";
  ex.answer = "The council approved a park on the old rail yard.";
  const fusion_eval::AssistantScoreSet scores{0.91, 0.42, 0.57};
  const auto& tmpl = fusion_eval::canonical_template();
  for (auto _ : state) benchmark::DoNotOptimize(fusion_eval::render_evaluation_prompt(tmpl, ex, scores));
}
BENCHMARK(BM_RenderCanonical);

}  // namespace
