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

// fusion_eval: plan, run and meta-evaluate LLM-fused summary evaluation.
//
//   fusion_eval plan      --out DIR [--planning-spec FILE] [--no-criteria] [--submit ...]
//   fusion_eval run       --dataset FILE --out DIR [--scores FILE | --scorer-endpoint URL]
//                         [--template FILE] [--llm live|mock|replay] [--model-id ID]
//                         [--parallelism N] [--max-failure-rate R]
//   fusion_eval meta-eval --predictions PATH --human FILE --out DIR [--stat both] ...
//   fusion_eval replay-export --run DIR --cache-dir DIR
//
// Exit codes: 0 ok, 1 failure rate above threshold, 2 configuration or input error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <string>
#include <vector>

#include "fusion_eval/error.hpp"
#include "fusion_eval/pipeline.hpp"

namespace {

using namespace fusion_eval;

constexpr int kExitOk = 0;
constexpr int kExitThreshold = 1;
constexpr int kExitConfig = 2;

struct LlmFlags {
  std::string backend = "mock";
  std::string model_id = "gpt-4";
  std::string endpoint = "https://api.openai.com";
  std::string api_key_env = "OPENAI_API_KEY";
  std::string cache_dir;
  double temperature = 0.0;
  int max_output_tokens = 1024;
  int sample_count = 1;
  int timeout_seconds = 120;
  int max_attempts = 5;

  void add_to(CLI::App* app) {
    app->add_option("--llm", backend, "LLM backend")
        ->check(CLI::IsMember({"live", "mock", "replay"}))
        ->capture_default_str();
    app->add_option("--model-id", model_id, "Model id sent to the LLM")->capture_default_str();
    app->add_option("--llm-endpoint", endpoint, "Base URL of the chat-completion API")
        ->capture_default_str();
    app->add_option("--api-key-env", api_key_env,
                    "Environment variable holding the API token (never passed as a flag)")
        ->capture_default_str();
    app->add_option("--cache-dir", cache_dir,
                    "Transcript store (live: cache, replay: source, mock: optional)");
    app->add_option("--temperature", temperature)->check(CLI::NonNegativeNumber)->capture_default_str();
    app->add_option("--max-output-tokens", max_output_tokens)
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--sample-count", sample_count)->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--timeout", timeout_seconds, "Per-request timeout, seconds")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--max-attempts", max_attempts, "Live backend attempts per request")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }

  LlmBackendSpec spec() const {
    LlmBackendSpec s;
    s.kind = backend_kind_from_string(backend).value_or(BackendKind::kMock);
    s.model_id = model_id;
    s.endpoint = endpoint;
    s.api_key_env = api_key_env;
    s.cache_dir = cache_dir;
    s.temperature = temperature;
    s.max_output_tokens = max_output_tokens;
    s.sample_count = sample_count;
    s.timeout_seconds = timeout_seconds;
    s.retry.max_attempts = max_attempts;
    return s;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fuse assistant-evaluator scores with an LLM judge and meta-evaluate the result"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Optional TOML/INI config file; flags override it");

  // plan
  auto* plan = app.add_subcommand("plan", "Write the evaluation-planning prompt");
  PlanConfig plan_config;
  std::string plan_out, planning_spec_file, criteria_file;
  bool no_criteria = false;
  LlmFlags plan_llm;
  plan->add_option("--out", plan_out, "Output directory")->required();
  plan->add_option("--planning-spec", planning_spec_file, "JSON planning spec")
      ->check(CLI::ExistingFile);
  plan->add_option("--criteria-file", criteria_file, "Text file with the evaluation criteria")
      ->check(CLI::ExistingFile);
  plan->add_flag("--no-criteria", no_criteria, "Ask the LLM to define its own criteria");
  plan->add_flag("--submit", plan_config.submit, "Send the prompt to the LLM and save the plan");
  plan_llm.add_to(plan);

  // run
  auto* run = app.add_subcommand("run", "Evaluate every example of a dataset");
  RunConfig run_config;
  std::string dataset, scores_file, scorer_endpoint, template_file, run_out;
  double bleurt_min = -1.0, bleurt_max = 1.0;
  LlmFlags run_llm;
  run->add_option("--dataset", dataset, "SummEval-style jsonl")->required();
  auto* scores_opt = run->add_option("--scores", scores_file, "Precomputed assistant scores (CSV)");
  auto* endpoint_opt =
      run->add_option("--scorer-endpoint", scorer_endpoint, "Scorer service base URL");
  scores_opt->excludes(endpoint_opt);
  run->add_option("--bleurt-min", bleurt_min, "Raw BLEURT value mapped to 0")->capture_default_str();
  run->add_option("--bleurt-max", bleurt_max, "Raw BLEURT value mapped to 1")->capture_default_str();
  run->add_option("--template", template_file, "Evaluation template (default: canonical)");
  run->add_option("--parallelism", run_config.parallelism, "Concurrent examples")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  run->add_option("--out", run_out, "Run directory")->required();
  run->add_option("--max-failure-rate", run_config.max_failure_rate,
                  "Highest failure rate that still exits 0")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  run_llm.add_to(run);

  // meta-eval
  auto* meta = app.add_subcommand("meta-eval", "Correlate evaluator scores with human judgments");
  MetaEvalConfig meta_config;
  std::string predictions, human, meta_out, reference, stat = "both", fusion_score = "criterion";
  std::vector<std::string> extra;
  bool no_assistant_rows = false;
  meta->add_option("--predictions", predictions, "Run directory, verdicts.jsonl or dataset jsonl")
      ->required();
  meta->add_option("--human", human, "SummEval jsonl with expert annotations")->required();
  meta->add_option("--out", meta_out, "Report directory")->required();
  meta->add_option("--stat", stat)->check(CLI::IsMember({"spearman", "kendall", "both"}))
      ->capture_default_str();
  meta->add_option("--fusion-score", fusion_score, "Verdict score correlated per criterion")
      ->check(CLI::IsMember({"criterion", "overall", "overall-mean"}))
      ->capture_default_str();
  meta->add_option("--reference", reference, "Static comparison rows (JSON)")
      ->check(CLI::ExistingFile);
  meta->add_option("--evaluator", extra, "Extra evaluator scores as NAME=CSV");
  meta->add_flag("--no-assistant-rows", no_assistant_rows, "Only report the fused scores");

  // replay-export
  auto* exporter = app.add_subcommand("replay-export", "Copy a run's transcripts into a cache");
  std::string export_run, export_cache;
  exporter->add_option("--run", export_run, "Run directory")->required();
  exporter->add_option("--cache-dir", export_cache, "Transcript store to fill")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*plan) {
      if (!planning_spec_file.empty()) plan_config.spec = load_planning_spec(planning_spec_file);
      if (!criteria_file.empty()) {
        std::ifstream in(criteria_file);
        plan_config.spec.criteria = std::string(std::istreambuf_iterator<char>(in), {});
      }
      if (no_criteria) plan_config.spec.criteria.reset();
      plan_config.out_dir = plan_out;
      plan_config.llm = plan_llm.spec();
      const auto result = run_plan(plan_config);
      std::cout << "planning prompt: " << result.prompt_file.string() << "\n";
      if (result.plan_file) std::cout << "plan: " << result.plan_file->string() << "\n";
      return kExitOk;
    }

    if (*run) {
      run_config.dataset = dataset;
      if (!scores_file.empty()) {
        run_config.scorer = ScorerBackendSpec::file(scores_file);
      } else if (!scorer_endpoint.empty()) {
        run_config.scorer = ScorerBackendSpec::http(scorer_endpoint);
      } else {
        run_config.scorer = ScorerBackendSpec::stub();
      }
      if (run_config.scorer.kind != ScorerKind::kStub) {
        run_config.scorer.normalization.bleurt = {bleurt_min, bleurt_max};
        run_config.scorer.normalization.sum_bleurt = {bleurt_min, bleurt_max};
        run_config.scorer.max_in_flight = run_config.parallelism;
      }
      if (!template_file.empty()) run_config.template_path = template_file;
      run_config.llm = run_llm.spec();
      run_config.out_dir = run_out;
      const auto summary = run_pipeline(run_config);
      std::cout << "examples: " << summary.examples << ", succeeded: " << summary.succeeded
                << ", failed: " << summary.failed << ", failure rate: " << summary.failure_rate
                << "\n";
      if (!summary.within_threshold) {
        std::cerr << "failure rate " << summary.failure_rate << " exceeds --max-failure-rate "
                  << run_config.max_failure_rate << "\n";
        return kExitThreshold;
      }
      return kExitOk;
    }

    if (*meta) {
      meta_config.predictions = predictions;
      meta_config.human = human;
      meta_config.out_dir = meta_out;
      meta_config.stats = {stat != "kendall", stat != "spearman"};
      meta_config.fusion_score = fusion_score == "overall"        ? FusionScoreSource::kOverall
                                 : fusion_score == "overall-mean" ? FusionScoreSource::kOverallMean
                                                                  : FusionScoreSource::kCriterion;
      meta_config.include_assistant_rows = !no_assistant_rows;
      if (!reference.empty()) meta_config.reference = reference;
      for (const auto& item : extra) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == item.size()) {
          throw Error(ErrorCode::kConfigError, "--evaluator expects NAME=CSV, got " + item);
        }
        meta_config.extra_evaluators.emplace_back(item.substr(0, eq), item.substr(eq + 1));
      }
      const auto report = run_meta_eval(meta_config);
      std::cout << report_to_text(report);
      return kExitOk;
    }

    if (*exporter) {
      const auto n = replay_export(export_run, export_cache);
      std::cout << "exported " << n << " transcripts to " << export_cache << "\n";
      return kExitOk;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
