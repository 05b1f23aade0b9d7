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

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fusion_eval/dataset.hpp"
#include "fusion_eval/llm_client.hpp"
#include "fusion_eval/meta_eval.hpp"
#include "fusion_eval/prompt.hpp"
#include "fusion_eval/scorers.hpp"

namespace fusion_eval {

struct LlmBackendSpec {
  BackendKind kind = BackendKind::kMock;
  std::string model_id = "gpt-4";
  std::string endpoint = "https://api.openai.com";  // live only
  std::string api_key_env = "OPENAI_API_KEY";       // the token never travels as a flag
  std::filesystem::path cache_dir;  // live: default ".fusion_eval_cache"; replay: required
  double temperature = 0.0;
  int max_output_tokens = 1024;
  int sample_count = 1;
  int timeout_seconds = 120;
  RetryPolicy retry;
};

// live -> cache(live), mock -> mock (cached when cache_dir is set),
// replay -> read-only transcript store.
std::unique_ptr<LlmBackend> make_llm_backend(const LlmBackendSpec& spec, int parallelism);

// ---------------------------------------------------------------------------
// run

struct RunConfig {
  std::filesystem::path dataset;
  ScorerBackendSpec scorer = ScorerBackendSpec::stub();
  std::optional<std::filesystem::path> template_path;  // none: the canonical template
  LlmBackendSpec llm;
  int parallelism = 1;
  std::filesystem::path out_dir;
  double max_failure_rate = 0.0;

  // Throws kConfigError naming the first problem found.
  void validate() const;
};

struct RunSummary {
  std::size_t examples = 0;
  std::size_t succeeded = 0;
  std::size_t failed = 0;
  double failure_rate = 0.0;
  bool within_threshold = true;  // failure_rate <= max_failure_rate
};

// Files written to out_dir; every record is ordered by (doc_id, system_id):
//   verdicts.jsonl     one parsed verdict per successful example
//   failures.jsonl     stage and error of each failed example
//   transcripts.jsonl  prompt and response of every completed LLM call
//   metadata.json      everything needed to re-run (digests, backends, settings)
inline constexpr const char* kVerdictsFile = "verdicts.jsonl";
inline constexpr const char* kFailuresFile = "failures.jsonl";
inline constexpr const char* kTranscriptsFile = "transcripts.jsonl";
inline constexpr const char* kMetadataFile = "metadata.json";

// Per-example errors are recorded, never thrown. Only configuration and
// dataset errors escape.
RunSummary run_pipeline(const RunConfig& config);

// Same, with caller-supplied backends (config.scorer and config.llm.kind are
// recorded in metadata but not used to build anything).
RunSummary run_pipeline(const RunConfig& config, const ScorerBackend& scorer, LlmBackend& llm);

// ---------------------------------------------------------------------------
// plan

struct PlanConfig {
  PlanningSpec spec = PlanningSpec::summeval_default();
  std::filesystem::path out_dir;
  bool submit = false;  // also send the prompt to the LLM and save its plan
  LlmBackendSpec llm;
};

inline constexpr const char* kPlanningPromptFile = "planning_prompt.txt";
inline constexpr const char* kPlanFile = "plan.txt";

// Missing keys fall back to PlanningSpec::summeval_default(); "criteria": null
// drops the criteria section.
PlanningSpec load_planning_spec(const std::filesystem::path& path);

struct PlanResult {
  std::filesystem::path prompt_file;
  std::optional<std::filesystem::path> plan_file;
};

PlanResult run_plan(const PlanConfig& config, LlmBackend* llm = nullptr);

// ---------------------------------------------------------------------------
// meta-eval

// Which verdict score fills FusionEval's criterion columns.
enum class FusionScoreSource { kCriterion, kOverall, kOverallMean };

struct MetaEvalConfig {
  // A run directory, a verdicts.jsonl file, or a SummEval jsonl whose
  // annotations are used as the evaluator.
  std::filesystem::path predictions;
  std::filesystem::path human;  // SummEval jsonl with expert annotations
  StatSelection stats;
  FusionScoreSource fusion_score = FusionScoreSource::kCriterion;
  bool include_assistant_rows = true;
  std::optional<std::filesystem::path> reference;  // static comparison rows
  // Extra evaluators from CSV: `doc_id,system_id,score` or
  // `doc_id,system_id,coherence,consistency,fluency,relevance`.
  std::vector<std::pair<std::string, std::filesystem::path>> extra_evaluators;
  std::filesystem::path out_dir;  // empty: do not write files
};

inline constexpr const char* kReportJsonFile = "report.json";
inline constexpr const char* kReportTextFile = "report.txt";

CorrelationReport run_meta_eval(const MetaEvalConfig& config);

EvaluatorScores load_evaluator_csv(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// replay-export: copy a run's transcripts into a transcript store so the run
// can be replayed. Returns the number of transcripts written.
std::size_t replay_export(const std::filesystem::path& run_dir,
                          const std::filesystem::path& cache_dir);

}  // namespace fusion_eval
