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

#include "fusion_eval/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "fusion_eval/error.hpp"
#include "fusion_eval/hashing.hpp"
#include "fusion_eval/response_parser.hpp"
#include "io_util.hpp"

namespace fusion_eval {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kDefaultLiveCacheDir = ".fusion_eval_cache";
constexpr const char* kVersion = "0.1.0";

[[noreturn]] void config_error(const std::string& message) {
  throw Error(ErrorCode::kConfigError, message);
}

void require_file(const fs::path& path, const std::string& what) {
  std::error_code ec;
  if (path.empty()) config_error(what + " path is empty");
  if (!fs::is_regular_file(path, ec)) config_error(what + " not found: " + path.string());
  std::ifstream probe(path);
  if (!probe) config_error(what + " unreadable: " + path.string());
}

json normalization_json(const NormalizationConfig& n) {
  json out = json::object();
  for (auto s : kAssistantScorers) {
    out[std::string(scorer_name(s))] = {{"min_raw", n.get(s).min_raw}, {"max_raw", n.get(s).max_raw}};
  }
  return out;
}

json triple_json(double nli, double bleurt, double sum_bleurt) {
  return {{"nli", nli}, {"bleurt", bleurt}, {"sum_bleurt", sum_bleurt}};
}

json score_json(const CriterionScore& s) { return {{"score", s.value}, {"explanation", s.explanation}}; }

struct Failure {
  std::string stage;
  std::string code;
  std::string message;
};

struct ExampleOutcome {
  ExampleKey key;
  std::optional<AssistantScores> scores;
  std::optional<LlmRequest> request;
  std::string digest;
  std::optional<std::string> response;
  std::optional<ParsedVerdict> parsed;
  std::optional<Failure> failure;
};

ExampleOutcome process_example(const EvaluationExample& ex, const PromptTemplate& tmpl,
                               const ScorerBackend& scorer, LlmBackend& llm,
                               const LlmBackendSpec& llm_spec) {
  ExampleOutcome out;
  out.key = ex.key();
  std::string stage = "score";
  try {
    out.scores = score_example(scorer, ex);
    stage = "render";
    LlmRequest req;
    req.model_id = llm_spec.model_id;
    req.prompt = render_evaluation_prompt(tmpl, ex, out.scores->normalized);
    req.temperature = llm_spec.temperature;
    req.max_output_tokens = llm_spec.max_output_tokens;
    req.sample_count = llm_spec.sample_count;
    out.digest = request_digest(req);
    out.request = std::move(req);
    stage = "complete";
    out.response = complete(llm, *out.request);
    stage = "parse";
    out.parsed = parse_verdict(*out.response);
  } catch (const Error& e) {
    out.failure = Failure{stage, std::string(to_string(e.code())), e.message()};
  } catch (const std::exception& e) {
    out.failure = Failure{stage, "Internal", e.what()};
  }
  return out;
}

std::string verdict_record(const ExampleOutcome& o) {
  const auto& v = o.parsed->verdict;
  const auto& d = o.parsed->diagnostics;
  json recovered = json::array();
  for (const auto& [section, rule] : d.recovered_with_tolerance) {
    recovered.push_back({{"section", section}, {"rule", rule}});
  }
  json assistant = {
      {"raw", triple_json(o.scores->raw.nli, o.scores->raw.bleurt, o.scores->raw.sum_bleurt)},
      {"normalized", triple_json(o.scores->normalized.nli, o.scores->normalized.bleurt,
                                 o.scores->normalized.sum_bleurt)}};
  if (!o.scores->model_versions.empty()) assistant["model_versions"] = o.scores->model_versions;
  json verdict = json::object();
  for (Criterion c : kTemplateCriteria) verdict[std::string(key_name(c))] = score_json(v.get(c));
  verdict["overall"] = score_json(v.overall);
  json record = {{"doc_id", o.key.doc_id},
                 {"system_id", o.key.system_id},
                 {"request_digest", o.digest},
                 {"assistant", std::move(assistant)},
                 {"verdict", std::move(verdict)},
                 {"overall_mean", overall_from_criteria(v)},
                 {"diagnostics",
                  {{"matched_sections", d.matched_sections},
                   {"recovered", std::move(recovered)},
                   {"warnings", d.warnings},
                   {"residual_text", d.residual_text}}}};
  return record.dump() + "\n";
}

std::string transcript_record(const ExampleOutcome& o, BackendKind backend) {
  json record = {{"doc_id", o.key.doc_id},
                 {"system_id", o.key.system_id},
                 {"request_digest", o.digest},
                 {"model_id", o.request->model_id},
                 {"temperature", o.request->temperature},
                 {"max_output_tokens", o.request->max_output_tokens},
                 {"backend", std::string(to_string(backend))},
                 {"prompt", o.request->prompt},
                 {"response", *o.response}};
  return record.dump() + "\n";
}

std::string failure_record(const ExampleOutcome& o) {
  json record = {{"doc_id", o.key.doc_id},
                 {"system_id", o.key.system_id},
                 {"stage", o.failure->stage},
                 {"error", o.failure->code},
                 {"message", o.failure->message}};
  return record.dump() + "\n";
}

template <typename Fn>
void for_each_jsonl(const fs::path& path, Fn fn) {
  const auto text = detail::read_file(path);
  std::size_t pos = 0, line_no = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const auto line = detail::trim(std::string_view(text).substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kMalformedRecord,
                  path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
    try {
      fn(j);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kMalformedRecord,
                  path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

std::string first_record_kind(const fs::path& path) {
  std::string kind = "empty";
  const auto text = detail::read_file(path);
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const auto line = detail::trim(std::string_view(text).substr(pos, end - pos));
    pos = end + 1;
    if (line.empty()) continue;
    try {
      const auto j = json::parse(line);
      if (j.contains("verdict")) return "verdicts";
      if (j.contains("id") && j.contains("model_id")) return "dataset";
    } catch (const json::parse_error&) {
    }
    return "unknown";
  }
  return kind;
}

double fusion_value(const json& record, Criterion c, FusionScoreSource source) {
  switch (source) {
    case FusionScoreSource::kCriterion:
      return record.at("verdict").at(std::string(key_name(c))).at("score").get<double>();
    case FusionScoreSource::kOverall:
      return record.at("verdict").at("overall").at("score").get<double>();
    case FusionScoreSource::kOverallMean:
      return record.at("overall_mean").get<double>();
  }
  return 0.0;
}

std::string_view to_string(FusionScoreSource s) {
  switch (s) {
    case FusionScoreSource::kCriterion: return "per-criterion verdict score";
    case FusionScoreSource::kOverall: return "LLM-reported overall score";
    case FusionScoreSource::kOverallMean: return "mean of the four criterion scores";
  }
  return "";
}

EvaluatorScores single_score_rows(const std::map<ExampleKey, double>& scores) {
  EvaluatorScores out;
  for (const auto& [key, value] : scores) {
    for (Criterion c : kReportCriteria) out[key][c] = value;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::unique_ptr<LlmBackend> make_llm_backend(const LlmBackendSpec& spec, int parallelism) {
  switch (spec.kind) {
    case BackendKind::kLive: {
      LiveBackendOptions options;
      if (const char* key = std::getenv(spec.api_key_env.c_str())) options.api_key = key;
      options.retry = spec.retry;
      options.max_parallel = std::max(1, parallelism);
      auto live = std::make_unique<LiveBackend>(
          make_http_transport(spec.endpoint, std::chrono::seconds(spec.timeout_seconds)),
          std::move(options));
      const auto dir = spec.cache_dir.empty() ? fs::path(kDefaultLiveCacheDir) : spec.cache_dir;
      return std::make_unique<CachingBackend>(std::move(live), dir);
    }
    case BackendKind::kMock: {
      auto mock = std::make_unique<MockBackend>();
      if (spec.cache_dir.empty()) return mock;
      return std::make_unique<CachingBackend>(std::move(mock), spec.cache_dir);
    }
    case BackendKind::kReplay:
      if (spec.cache_dir.empty()) config_error("replay backend needs a cache directory");
      return std::make_unique<ReplayBackend>(spec.cache_dir);
  }
  config_error("unknown LLM backend");
}

void RunConfig::validate() const {
  require_file(dataset, "dataset");
  if (template_path) require_file(*template_path, "template");
  if (scorer.kind == ScorerKind::kFile) require_file(scorer.location, "score file");
  if (scorer.kind == ScorerKind::kHttp && scorer.location.empty()) {
    config_error("http scorer needs an endpoint");
  }
  scorer.normalization.validate();
  if (parallelism < 1) config_error("parallelism must be >= 1");
  if (!(max_failure_rate >= 0.0 && max_failure_rate <= 1.0)) {
    config_error("max failure rate must be within [0, 1]");
  }
  if (out_dir.empty()) config_error("output directory is empty");
  if (llm.kind == BackendKind::kReplay) {
    std::error_code ec;
    if (llm.cache_dir.empty() || !fs::is_directory(llm.cache_dir, ec)) {
      config_error("replay needs an existing cache directory: " + llm.cache_dir.string());
    }
  }
  if (llm.model_id.empty()) config_error("model id is empty");
  if (llm.temperature < 0.0) config_error("temperature must be >= 0");
  if (llm.max_output_tokens <= 0 || llm.sample_count < 1) {
    config_error("max output tokens and sample count must be positive");
  }
}

RunSummary run_pipeline(const RunConfig& config) {
  config.validate();
  auto scorer = make_scorer(config.scorer);
  auto llm = make_llm_backend(config.llm, config.parallelism);
  return run_pipeline(config, *scorer, *llm);
}

RunSummary run_pipeline(const RunConfig& config, const ScorerBackend& scorer, LlmBackend& llm) {
  config.validate();
  const auto dataset_bytes = detail::read_file(config.dataset);
  const auto dataset = parse_dataset(dataset_bytes);
  const auto tmpl = config.template_path ? load_template(*config.template_path) : canonical_template();
  for (const auto& name : tmpl.placeholders) {
    if (std::find(kCanonicalPlaceholders.begin(), kCanonicalPlaceholders.end(), name) ==
        kCanonicalPlaceholders.end()) {
      config_error("template uses unknown placeholder {" + name + "}");
    }
  }

  std::vector<ExampleOutcome> outcomes(dataset.examples.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < outcomes.size(); i = next.fetch_add(1)) {
      outcomes[i] = process_example(dataset.examples[i], tmpl, scorer, llm, config.llm);
    }
  };
  {
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config.parallelism),
                                               std::max<std::size_t>(outcomes.size(), 1));
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  }
  std::sort(outcomes.begin(), outcomes.end(),
            [](const ExampleOutcome& a, const ExampleOutcome& b) { return a.key < b.key; });

  // Single writer, canonical order.
  std::string verdicts, failures, transcripts;
  RunSummary summary;
  summary.examples = outcomes.size();
  for (const auto& o : outcomes) {
    if (o.response) transcripts += transcript_record(o, llm.kind());
    if (o.failure) {
      ++summary.failed;
      failures += failure_record(o);
    } else {
      ++summary.succeeded;
      verdicts += verdict_record(o);
    }
  }
  summary.failure_rate = summary.examples == 0 ? 0.0
                                               : static_cast<double>(summary.failed) /
                                                     static_cast<double>(summary.examples);
  summary.within_threshold = summary.failure_rate <= config.max_failure_rate;

  json scorer_meta = {{"kind", std::string(to_string(config.scorer.kind))},
                      {"normalization", normalization_json(scorer.normalization())}};
  if (!config.scorer.location.empty()) scorer_meta["location"] = config.scorer.location;
  json llm_meta = {{"backend", std::string(to_string(llm.kind()))},
                   {"model_id", config.llm.model_id},
                   {"temperature", config.llm.temperature},
                   {"max_output_tokens", config.llm.max_output_tokens},
                   {"sample_count", config.llm.sample_count}};
  if (llm.kind() == BackendKind::kLive) {
    llm_meta["endpoint"] = config.llm.endpoint;
    llm_meta["api_key_env"] = config.llm.api_key_env;
  }
  if (!config.llm.cache_dir.empty()) llm_meta["cache_dir"] = config.llm.cache_dir.string();
  json metadata = {
      {"tool", "fusion_eval"},
      {"version", kVersion},
      {"dataset", {{"path", config.dataset.string()}, {"sha256", sha256_hex(dataset_bytes)}}},
      {"template",
       {{"path", config.template_path ? config.template_path->string() : std::string("<canonical>")},
        {"sha256", sha256_hex(tmpl.body)}}},
      {"scorer", std::move(scorer_meta)},
      {"llm", std::move(llm_meta)},
      {"prompt_score_decimals", 3},
      {"max_failure_rate", config.max_failure_rate},
      {"counts",
       {{"examples", summary.examples}, {"succeeded", summary.succeeded}, {"failed", summary.failed}}},
      {"failure_rate", summary.failure_rate},
      {"within_threshold", summary.within_threshold},
      {"overall_scores", "LLM-reported overall and recomputed criterion mean both recorded"},
  };

  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + config.out_dir.string());
  detail::write_file_atomic(config.out_dir / kVerdictsFile, verdicts);
  detail::write_file_atomic(config.out_dir / kFailuresFile, failures);
  detail::write_file_atomic(config.out_dir / kTranscriptsFile, transcripts);
  detail::write_file_atomic(config.out_dir / kMetadataFile, metadata.dump(2) + "\n");
  return summary;
}

// ---------------------------------------------------------------------------

PlanningSpec load_planning_spec(const fs::path& path) {
  auto spec = PlanningSpec::summeval_default();
  try {
    const auto j = json::parse(detail::read_file(path));
    if (j.contains("task_definition")) spec.task_definition = j["task_definition"].get<std::string>();
    if (j.contains("criteria")) {
      if (j["criteria"].is_null()) {
        spec.criteria.reset();
      } else {
        spec.criteria = j["criteria"].get<std::string>();
      }
    }
    if (j.contains("evaluators")) {
      spec.evaluators.clear();
      for (const auto& e : j["evaluators"]) {
        spec.evaluators.push_back(
            {e.at("name").get<std::string>(), e.at("description").get<std::string>()});
      }
    }
    if (j.contains("output_request")) spec.output_request = j["output_request"].get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, path.string() + ": " + e.what());
  }
  return spec;
}

PlanResult run_plan(const PlanConfig& config, LlmBackend* llm) {
  if (config.out_dir.empty()) config_error("output directory is empty");
  const auto prompt = build_planning_prompt(config.spec);
  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + config.out_dir.string());

  PlanResult result;
  result.prompt_file = config.out_dir / kPlanningPromptFile;
  detail::write_file_atomic(result.prompt_file, prompt);
  if (config.submit) {
    std::unique_ptr<LlmBackend> owned;
    if (llm == nullptr) {
      owned = make_llm_backend(config.llm, 1);
      llm = owned.get();
    }
    LlmRequest req;
    req.model_id = config.llm.model_id;
    req.prompt = prompt;
    req.temperature = config.llm.temperature;
    req.max_output_tokens = config.llm.max_output_tokens;
    req.sample_count = config.llm.sample_count;
    result.plan_file = config.out_dir / kPlanFile;
    detail::write_file_atomic(*result.plan_file, complete(*llm, req));
  }
  return result;
}

// ---------------------------------------------------------------------------

EvaluatorScores load_evaluator_csv(const fs::path& path) {
  const auto text = detail::read_file(path);
  EvaluatorScores out;
  std::vector<std::optional<Criterion>> columns;  // nullopt: single score for all criteria
  std::size_t pos = 0, line_no = 0;
  bool header = true;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const auto line = detail::trim(std::string_view(text).substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      cells.emplace_back(detail::trim(line.substr(start, comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    const auto where = path.string() + " line " + std::to_string(line_no);
    if (header) {
      if (cells.size() < 3 || cells[0] != "doc_id" || cells[1] != "system_id") {
        throw Error(ErrorCode::kMalformedRow, where + ": expected doc_id,system_id,...");
      }
      if (cells.size() == 3 && cells[2] == "score") {
        columns.push_back(std::nullopt);
      } else {
        for (std::size_t i = 2; i < cells.size(); ++i) {
          auto c = criterion_from_key(cells[i]);
          if (!c) throw Error(ErrorCode::kMalformedRow, where + ": unknown column " + cells[i]);
          columns.push_back(c);
        }
      }
      header = false;
      continue;
    }
    if (cells.size() != columns.size() + 2) {
      throw Error(ErrorCode::kMalformedRow, where + ": wrong number of columns");
    }
    ExampleKey key{cells[0], cells[1]};
    if (out.contains(key)) throw Error(ErrorCode::kDuplicateKey, where + ": " + to_string(key));
    auto& row = out[key];
    for (std::size_t i = 0; i < columns.size(); ++i) {
      double value = 0.0;
      const auto& cell = cells[i + 2];
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size()) {
        throw Error(ErrorCode::kMalformedRow, where + ": not a number: " + cell);
      }
      if (columns[i]) {
        row[*columns[i]] = value;
      } else {
        for (Criterion c : kReportCriteria) row[c] = value;
      }
    }
  }
  return out;
}

CorrelationReport run_meta_eval(const MetaEvalConfig& config) {
  require_file(config.human, "human annotations");
  const auto human_data = load_dataset(config.human);
  HumanScores human;
  for (const auto& ex : human_data.examples) {
    if (ex.human) human.emplace(ex.key(), *ex.human);
  }

  std::error_code ec;
  fs::path verdicts_path = config.predictions;
  std::optional<fs::path> failures_path;
  if (fs::is_directory(config.predictions, ec)) {
    verdicts_path = config.predictions / kVerdictsFile;
    failures_path = config.predictions / kFailuresFile;
  }
  require_file(verdicts_path, "predictions");

  std::vector<std::pair<std::string, EvaluatorScores>> runs;
  ReportOptions options;
  options.stats = config.stats;
  const auto kind = first_record_kind(verdicts_path);
  if (kind == "dataset") {
    const auto pred = load_dataset(verdicts_path);
    EvaluatorScores scores;
    for (const auto& ex : pred.examples) {
      if (!ex.human) {
        throw Error(ErrorCode::kMalformedRecord, to_string(ex.key()) + " has no annotations");
      }
      for (Criterion c : kReportCriteria) scores[ex.key()][c] = ex.human->get(c);
    }
    runs.emplace_back(verdicts_path.stem().string(), std::move(scores));
    options.metadata["predictions"] = "annotations of " + verdicts_path.filename().string();
  } else if (kind == "verdicts" || kind == "empty") {
    std::map<ExampleKey, double> nli, bleurt, sum_bleurt;
    EvaluatorScores fusion;
    for_each_jsonl(verdicts_path, [&](const json& r) {
      ExampleKey key{r.at("doc_id").get<std::string>(), r.at("system_id").get<std::string>()};
      const auto& norm = r.at("assistant").at("normalized");
      nli[key] = norm.at("nli").get<double>();
      bleurt[key] = norm.at("bleurt").get<double>();
      sum_bleurt[key] = norm.at("sum_bleurt").get<double>();
      for (Criterion c : kReportCriteria) fusion[key][c] = fusion_value(r, c, config.fusion_score);
    });
    if (config.include_assistant_rows) {
      runs.emplace_back("NLI(src, ans)", single_score_rows(nli));
      runs.emplace_back("Bleurt(src, ans)", single_score_rows(bleurt));
      runs.emplace_back("SumBleurt(src, ans)", single_score_rows(sum_bleurt));
    }
    runs.emplace_back("FusionEval(src, ans)", std::move(fusion));
    options.metadata["fusion_score"] = std::string(to_string(config.fusion_score));
    options.metadata["assistant_scores"] = "normalized";
  } else {
    throw Error(ErrorCode::kMalformedRecord,
                verdicts_path.string() + ": neither verdict records nor a dataset");
  }

  if (failures_path && fs::is_regular_file(*failures_path, ec)) {
    for_each_jsonl(*failures_path, [&](const json& r) {
      options.excluded.insert(
          {r.at("doc_id").get<std::string>(), r.at("system_id").get<std::string>()});
    });
  }
  for (const auto& [name, path] : config.extra_evaluators) {
    require_file(path, "evaluator scores");
    runs.emplace_back(name, load_evaluator_csv(path));
  }
  options.metadata["annotation_source"] = "expert";
  options.metadata["annotation_aggregation"] = "mean of expert ratings per criterion";

  auto report = build_report(runs, human, options);
  if (config.reference) add_reference_rows(report, load_reference_rows(*config.reference));

  if (!config.out_dir.empty()) {
    fs::create_directories(config.out_dir, ec);
    if (ec) throw Error(ErrorCode::kIoError, "cannot create " + config.out_dir.string());
    detail::write_file_atomic(config.out_dir / kReportJsonFile, report_to_json(report));
    detail::write_file_atomic(config.out_dir / kReportTextFile, report_to_text(report));
  }
  return report;
}

// ---------------------------------------------------------------------------

std::size_t replay_export(const fs::path& run_dir, const fs::path& cache_dir) {
  const auto path = run_dir / kTranscriptsFile;
  require_file(path, "run transcripts");
  TranscriptStore store(cache_dir);
  const auto now = utc_timestamp_now();
  std::size_t count = 0;
  for_each_jsonl(path, [&](const json& r) {
    Transcript t;
    t.request_digest = r.at("request_digest").get<std::string>();
    t.model_id = r.at("model_id").get<std::string>();
    t.temperature = r.at("temperature").get<double>();
    t.max_output_tokens = r.at("max_output_tokens").get<int>();
    t.prompt = r.at("prompt").get<std::string>();
    t.response = r.at("response").get<std::string>();
    t.timestamp = now;
    t.backend = backend_kind_from_string(r.value("backend", "live")).value_or(BackendKind::kLive);
    LlmRequest check{t.model_id, t.prompt, t.temperature, t.max_output_tokens, 1};
    if (request_digest(check) != t.request_digest) {
      throw Error(ErrorCode::kMalformedRecord,
                  "transcript digest mismatch for " + r.at("doc_id").get<std::string>() + "/" +
                      r.at("system_id").get<std::string>());
    }
    store.put(t);
    ++count;
  });
  return count;
}

}  // namespace fusion_eval
