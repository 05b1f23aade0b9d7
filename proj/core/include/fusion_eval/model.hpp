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
#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fusion_eval {

// The four SummEval quality dimensions, in report column order.
enum class Criterion { kCoherence, kConsistency, kFluency, kRelevance };

inline constexpr std::array<Criterion, 4> kReportCriteria = {
    Criterion::kCoherence, Criterion::kConsistency, Criterion::kFluency, Criterion::kRelevance};

// Section order of the evaluation Output Template.
inline constexpr std::array<Criterion, 4> kTemplateCriteria = {
    Criterion::kCoherence, Criterion::kConsistency, Criterion::kRelevance, Criterion::kFluency};

std::string_view display_name(Criterion c);  // "Coherence"
std::string_view key_name(Criterion c);      // "coherence"
std::optional<Criterion> criterion_from_key(std::string_view key);

struct ExampleKey {
  std::string doc_id;
  std::string system_id;

  auto operator<=>(const ExampleKey&) const = default;
  bool operator==(const ExampleKey&) const = default;
};

std::string to_string(const ExampleKey& key);  // "doc_id/system_id"

// One expert's ratings for a summary, each in {1..5}.
struct ExpertRating {
  int coherence = 0;
  int consistency = 0;
  int fluency = 0;
  int relevance = 0;

  int get(Criterion c) const;
  bool operator==(const ExpertRating&) const = default;
};

// Aggregated human judgment. Each aggregated score is the mean of the raw
// ratings for that criterion when raw ratings are present.
struct HumanAnnotation {
  double coherence = 0.0;
  double consistency = 0.0;
  double fluency = 0.0;
  double relevance = 0.0;
  std::vector<ExpertRating> raw_annotations;

  double get(Criterion c) const;
  bool operator==(const HumanAnnotation&) const = default;
};

struct EvaluationExample {
  std::string doc_id;
  std::string system_id;
  std::string source;  // article
  std::string answer;  // candidate summary
  std::optional<HumanAnnotation> human;

  ExampleKey key() const { return {doc_id, system_id}; }
};

// Normalized assistant-evaluator scores, each in [0,1].
struct AssistantScoreSet {
  double nli = 0.0;
  double bleurt = 0.0;
  double sum_bleurt = 0.0;

  bool operator==(const AssistantScoreSet&) const = default;
};

struct CriterionScore {
  double value = 0.0;  // in [1,5]; may be fractional
  std::string explanation;

  bool operator==(const CriterionScore&) const = default;
};

struct FusionVerdict {
  CriterionScore coherence;
  CriterionScore consistency;
  CriterionScore relevance;
  CriterionScore fluency;
  CriterionScore overall;  // as reported by the LLM
  std::string raw_response;

  const CriterionScore& get(Criterion c) const;
  CriterionScore& get(Criterion c);
  bool operator==(const FusionVerdict&) const = default;
};

inline constexpr double kMinScore = 1.0;
inline constexpr double kMaxScore = 5.0;

// Arithmetic mean of the four criterion values. Kept next to, never in place
// of, the LLM-reported overall.
double overall_from_criteria(const FusionVerdict& verdict);

}  // namespace fusion_eval
