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

#include <array>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <semaphore>
#include <string>
#include <string_view>

#include "fusion_eval/model.hpp"

namespace fusion_eval {

enum class AssistantScorer { kNli, kBleurt, kSumBleurt };

inline constexpr std::array<AssistantScorer, 3> kAssistantScorers = {
    AssistantScorer::kNli, AssistantScorer::kBleurt, AssistantScorer::kSumBleurt};

std::string_view scorer_name(AssistantScorer s);  // "nli", "bleurt", "sum_bleurt"

// Affine map of [min_raw, max_raw] onto [0,1], clamped at both ends.
struct NormalizationSpec {
  double min_raw = 0.0;
  double max_raw = 1.0;

  double apply(double raw) const;
  bool operator==(const NormalizationSpec&) const = default;
};

struct NormalizationConfig {
  NormalizationSpec nli{0.0, 1.0};
  NormalizationSpec bleurt{-1.0, 1.0};
  NormalizationSpec sum_bleurt{-1.0, 1.0};

  static NormalizationConfig identity() { return {{0, 1}, {0, 1}, {0, 1}}; }
  const NormalizationSpec& get(AssistantScorer s) const;
  NormalizationSpec& get(AssistantScorer s);
  // Throws kConfigError unless max_raw > min_raw for every scorer.
  void validate() const;
  bool operator==(const NormalizationConfig&) const = default;
};

struct RawScoreTriple {
  double nli = 0.0;
  double bleurt = 0.0;
  double sum_bleurt = 0.0;

  double get(AssistantScorer s) const;
  bool operator==(const RawScoreTriple&) const = default;
};

// Normalized scores plus what produced them.
struct AssistantScores {
  RawScoreTriple raw;
  AssistantScoreSet normalized;
  std::map<std::string, std::string> model_versions;
};

// Throws kNonFiniteScore when any raw value is NaN or infinite.
AssistantScoreSet normalize(const RawScoreTriple& raw, const NormalizationConfig& config);

class ScorerBackend {
 public:
  virtual ~ScorerBackend() = default;
  // Safe to call concurrently for distinct examples.
  virtual AssistantScores score(const EvaluationExample& ex) const = 0;
  virtual const NormalizationConfig& normalization() const = 0;
};

AssistantScores score_example(const ScorerBackend& backend, const EvaluationExample& ex);

// ---------------------------------------------------------------------------
// Score files: comma-separated, header `doc_id,system_id,nli,bleurt,sum_bleurt`,
// raw (un-normalized) values.

using ScoreTable = std::map<ExampleKey, RawScoreTriple>;

ScoreTable parse_score_file(std::string_view contents);
ScoreTable load_score_file(const std::filesystem::path& path);
std::string format_score_file(const ScoreTable& table);
void write_score_file(const std::filesystem::path& path, const ScoreTable& table);

// ---------------------------------------------------------------------------
// Backends.

class FileScorer final : public ScorerBackend {
 public:
  FileScorer(ScoreTable table, NormalizationConfig normalization);
  AssistantScores score(const EvaluationExample& ex) const override;
  const NormalizationConfig& normalization() const override { return normalization_; }
  std::size_t size() const { return table_.size(); }

 private:
  ScoreTable table_;
  NormalizationConfig normalization_;
};

// Deterministic stand-in for the real evaluators:
//   value = fnv1a64(doc_id + "\x1f" + system_id + "\x1f" + scorer_name) / 2^64
// Values are already in [0,1], so the default normalization is identity.
double stub_score(std::string_view doc_id, std::string_view system_id,
                  AssistantScorer scorer);

class StubScorer final : public ScorerBackend {
 public:
  explicit StubScorer(NormalizationConfig normalization = NormalizationConfig::identity());
  AssistantScores score(const EvaluationExample& ex) const override;
  const NormalizationConfig& normalization() const override { return normalization_; }

 private:
  NormalizationConfig normalization_;
};

// POST {endpoint}/score  {"source", "answer", "scorers": [...]}
//   -> {"scores": {"nli": x, "bleurt": x, "sum_bleurt": x}, "model_versions": {...}}
class HttpScorer final : public ScorerBackend {
 public:
  HttpScorer(std::string endpoint, NormalizationConfig normalization, int max_in_flight = 4,
             std::chrono::milliseconds timeout = std::chrono::seconds(60));
  AssistantScores score(const EvaluationExample& ex) const override;
  const NormalizationConfig& normalization() const override { return normalization_; }

 private:
  std::string endpoint_;
  NormalizationConfig normalization_;
  std::chrono::milliseconds timeout_;
  mutable std::counting_semaphore<> in_flight_;
};

enum class ScorerKind { kFile, kHttp, kStub };

std::string_view to_string(ScorerKind kind);

struct ScorerBackendSpec {
  ScorerKind kind = ScorerKind::kStub;
  std::string location;  // score-file path (file) or base URL (http); unused for stub
  NormalizationConfig normalization = NormalizationConfig::identity();
  int max_in_flight = 4;

  // Defaults: identity for stub, (-1,1) clamp on BLEURT-family otherwise.
  static ScorerBackendSpec file(std::string path);
  static ScorerBackendSpec http(std::string endpoint);
  static ScorerBackendSpec stub();
};

std::unique_ptr<ScorerBackend> make_scorer(const ScorerBackendSpec& spec);

}  // namespace fusion_eval
