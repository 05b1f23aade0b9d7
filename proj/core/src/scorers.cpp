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

#include "fusion_eval/scorers.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <vector>

#include "fusion_eval/error.hpp"
#include "fusion_eval/hashing.hpp"
#include "http_util.hpp"
#include "io_util.hpp"

namespace fusion_eval {
namespace {

constexpr std::string_view kScoreFileHeader[] = {"doc_id", "system_id", "nli", "bleurt",
                                                  "sum_bleurt"};

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(detail::trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

[[noreturn]] void malformed_row(std::size_t line, const std::string& reason) {
  throw Error(ErrorCode::kMalformedRow, "line " + std::to_string(line) + ": " + reason);
}

double parse_double(std::string_view cell, std::size_t line, std::string_view column) {
  double value = 0.0;
  const auto* first = cell.data();
  const auto* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (cell.empty() || ec != std::errc{} || ptr != last) {
    malformed_row(line, std::string(column) + " is not a number: '" + std::string(cell) + "'");
  }
  return value;
}

}  // namespace

std::string_view scorer_name(AssistantScorer s) {
  switch (s) {
    case AssistantScorer::kNli: return "nli";
    case AssistantScorer::kBleurt: return "bleurt";
    case AssistantScorer::kSumBleurt: return "sum_bleurt";
  }
  return "";
}

double NormalizationSpec::apply(double raw) const {
  return std::clamp((raw - min_raw) / (max_raw - min_raw), 0.0, 1.0);
}

const NormalizationSpec& NormalizationConfig::get(AssistantScorer s) const {
  switch (s) {
    case AssistantScorer::kNli: return nli;
    case AssistantScorer::kBleurt: return bleurt;
    case AssistantScorer::kSumBleurt: return sum_bleurt;
  }
  return nli;
}

NormalizationSpec& NormalizationConfig::get(AssistantScorer s) {
  return const_cast<NormalizationSpec&>(std::as_const(*this).get(s));
}

void NormalizationConfig::validate() const {
  for (auto s : kAssistantScorers) {
    const auto& spec = get(s);
    if (!(std::isfinite(spec.min_raw) && std::isfinite(spec.max_raw) &&
          spec.max_raw > spec.min_raw)) {
      throw Error(ErrorCode::kConfigError,
                  "normalization for " + std::string(scorer_name(s)) + " needs max_raw > min_raw");
    }
  }
}

double RawScoreTriple::get(AssistantScorer s) const {
  switch (s) {
    case AssistantScorer::kNli: return nli;
    case AssistantScorer::kBleurt: return bleurt;
    case AssistantScorer::kSumBleurt: return sum_bleurt;
  }
  return 0.0;
}

AssistantScoreSet normalize(const RawScoreTriple& raw, const NormalizationConfig& config) {
  for (auto s : kAssistantScorers) {
    if (!std::isfinite(raw.get(s))) {
      throw Error(ErrorCode::kNonFiniteScore, std::string(scorer_name(s)) + " is not finite");
    }
  }
  return {config.nli.apply(raw.nli), config.bleurt.apply(raw.bleurt),
          config.sum_bleurt.apply(raw.sum_bleurt)};
}

AssistantScores score_example(const ScorerBackend& backend, const EvaluationExample& ex) {
  return backend.score(ex);
}

// ---------------------------------------------------------------------------

ScoreTable parse_score_file(std::string_view contents) {
  ScoreTable table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool header_seen = false;
  while (pos < contents.size()) {
    auto end = contents.find('\n', pos);
    if (end == std::string_view::npos) end = contents.size();
    auto line = contents.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (detail::trim(line).empty()) continue;

    const auto cells = split_commas(line);
    if (!header_seen) {
      if (!std::equal(cells.begin(), cells.end(), std::begin(kScoreFileHeader),
                      std::end(kScoreFileHeader))) {
        malformed_row(line_no, "expected header 'doc_id,system_id,nli,bleurt,sum_bleurt'");
      }
      header_seen = true;
      continue;
    }
    if (cells.size() != 5) {
      malformed_row(line_no, "expected 5 columns, found " + std::to_string(cells.size()));
    }
    if (cells[0].empty() || cells[1].empty()) malformed_row(line_no, "empty doc_id or system_id");
    RawScoreTriple triple{parse_double(cells[2], line_no, "nli"),
                          parse_double(cells[3], line_no, "bleurt"),
                          parse_double(cells[4], line_no, "sum_bleurt")};
    ExampleKey key{std::string(cells[0]), std::string(cells[1])};
    if (table.contains(key)) {
      throw Error(ErrorCode::kDuplicateKey,
                  "line " + std::to_string(line_no) + ": " + to_string(key));
    }
    table.emplace(std::move(key), triple);
  }
  return table;
}

ScoreTable load_score_file(const std::filesystem::path& path) {
  return parse_score_file(detail::read_file(path));
}

std::string format_score_file(const ScoreTable& table) {
  std::string out = "doc_id,system_id,nli,bleurt,sum_bleurt\n";
  for (const auto& [key, triple] : table) {
    for (const auto* id : {&key.doc_id, &key.system_id}) {
      if (id->empty() || id->find_first_of(",\r\n") != std::string::npos ||
          detail::trim(*id).size() != id->size()) {
        throw Error(ErrorCode::kInvalidArgument, "id not representable in a score file: " + *id);
      }
    }
    out += key.doc_id + ',' + key.system_id + ',' + detail::format_shortest(triple.nli) + ',' +
           detail::format_shortest(triple.bleurt) + ',' +
           detail::format_shortest(triple.sum_bleurt) + '\n';
  }
  return out;
}

void write_score_file(const std::filesystem::path& path, const ScoreTable& table) {
  detail::write_file_atomic(path, format_score_file(table));
}

// ---------------------------------------------------------------------------

FileScorer::FileScorer(ScoreTable table, NormalizationConfig normalization)
    : table_(std::move(table)), normalization_(normalization) {
  normalization_.validate();
}

AssistantScores FileScorer::score(const EvaluationExample& ex) const {
  auto it = table_.find(ex.key());
  if (it == table_.end()) {
    throw Error(ErrorCode::kMissingScore, to_string(ex.key()) + ": no row in score file");
  }
  return {it->second, normalize(it->second, normalization_), {}};
}

double stub_score(std::string_view doc_id, std::string_view system_id, AssistantScorer scorer) {
  std::string key;
  key.reserve(doc_id.size() + system_id.size() + 16);
  key.append(doc_id).append(1, '\x1f').append(system_id).append(1, '\x1f').append(
      scorer_name(scorer));
  return static_cast<double>(fnv1a64(key)) / 18446744073709551616.0;  // 2^64
}

StubScorer::StubScorer(NormalizationConfig normalization) : normalization_(normalization) {
  normalization_.validate();
}

AssistantScores StubScorer::score(const EvaluationExample& ex) const {
  RawScoreTriple raw{stub_score(ex.doc_id, ex.system_id, AssistantScorer::kNli),
                     stub_score(ex.doc_id, ex.system_id, AssistantScorer::kBleurt),
                     stub_score(ex.doc_id, ex.system_id, AssistantScorer::kSumBleurt)};
  return {raw, normalize(raw, normalization_), {}};
}

HttpScorer::HttpScorer(std::string endpoint, NormalizationConfig normalization,
                       int max_in_flight, std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)),
      normalization_(normalization),
      timeout_(timeout),
      in_flight_(std::max(1, max_in_flight)) {
  normalization_.validate();
  (void)detail::split_url(endpoint_);  // validate early
}

AssistantScores HttpScorer::score(const EvaluationExample& ex) const {
  using nlohmann::json;
  const auto url = detail::split_url(endpoint_);
  json body = {{"source", ex.source},
               {"answer", ex.answer},
               {"scorers", json::array({"nli", "bleurt", "sum_bleurt"})}};

  httplib::Result result;
  {
    in_flight_.acquire();
    struct Release {
      std::counting_semaphore<>& s;
      ~Release() { s.release(); }
    } release{in_flight_};
    httplib::Client client(url.origin);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    client.set_connection_timeout(seconds);
    client.set_read_timeout(seconds);
    client.set_write_timeout(seconds);
    result = client.Post(url.path_prefix + "/score", body.dump(), "application/json");
  }
  if (!result) {
    throw Error(ErrorCode::kBackendUnavailable,
                endpoint_ + ": " + httplib::to_string(result.error()));
  }
  if (result->status != 200) {
    throw Error(ErrorCode::kBackendUnavailable,
                endpoint_ + ": HTTP " + std::to_string(result->status) + " " + result->body);
  }

  json response;
  try {
    response = json::parse(result->body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kBackendUnavailable, endpoint_ + ": invalid JSON response");
  }
  const json* scores = response.is_object() && response.contains("scores") &&
                               response["scores"].is_object()
                           ? &response["scores"]
                           : nullptr;
  if (scores == nullptr) {
    throw Error(ErrorCode::kBackendUnavailable, endpoint_ + ": response has no 'scores' object");
  }

  RawScoreTriple raw;
  for (auto s : kAssistantScorers) {
    const auto name = std::string(scorer_name(s));
    auto it = scores->find(name);
    if (it == scores->end() || !it->is_number()) {
      std::string why = "missing";
      if (response.contains("errors") && response["errors"].contains(name)) {
        why = response["errors"][name].dump();
      }
      throw Error(ErrorCode::kMissingScore, to_string(ex.key()) + ": " + name + " " + why);
    }
    const double v = it->get<double>();
    switch (s) {
      case AssistantScorer::kNli: raw.nli = v; break;
      case AssistantScorer::kBleurt: raw.bleurt = v; break;
      case AssistantScorer::kSumBleurt: raw.sum_bleurt = v; break;
    }
  }

  AssistantScores out{raw, normalize(raw, normalization_), {}};
  if (auto it = response.find("model_versions"); it != response.end() && it->is_object()) {
    for (const auto& [name, version] : it->items()) {
      out.model_versions[name] = version.is_string() ? version.get<std::string>() : version.dump();
    }
  }
  return out;
}

std::string_view to_string(ScorerKind kind) {
  switch (kind) {
    case ScorerKind::kFile: return "file";
    case ScorerKind::kHttp: return "http";
    case ScorerKind::kStub: return "stub";
  }
  return "";
}

ScorerBackendSpec ScorerBackendSpec::file(std::string path) {
  return {ScorerKind::kFile, std::move(path), NormalizationConfig{}, 4};
}

ScorerBackendSpec ScorerBackendSpec::http(std::string endpoint) {
  return {ScorerKind::kHttp, std::move(endpoint), NormalizationConfig{}, 4};
}

ScorerBackendSpec ScorerBackendSpec::stub() {
  return {ScorerKind::kStub, {}, NormalizationConfig::identity(), 4};
}

std::unique_ptr<ScorerBackend> make_scorer(const ScorerBackendSpec& spec) {
  switch (spec.kind) {
    case ScorerKind::kFile:
      if (spec.location.empty()) throw Error(ErrorCode::kConfigError, "file scorer needs a path");
      return std::make_unique<FileScorer>(load_score_file(spec.location), spec.normalization);
    case ScorerKind::kHttp:
      if (spec.location.empty()) {
        throw Error(ErrorCode::kConfigError, "http scorer needs an endpoint");
      }
      return std::make_unique<HttpScorer>(spec.location, spec.normalization, spec.max_in_flight);
    case ScorerKind::kStub:
      return std::make_unique<StubScorer>(spec.normalization);
  }
  throw Error(ErrorCode::kConfigError, "unknown scorer kind");
}

}  // namespace fusion_eval
