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

#include "fusion_eval/model.hpp"

#include <algorithm>
#include <utility>

namespace fusion_eval {

std::string_view display_name(Criterion c) {
  switch (c) {
    case Criterion::kCoherence: return "Coherence";
    case Criterion::kConsistency: return "Consistency";
    case Criterion::kFluency: return "Fluency";
    case Criterion::kRelevance: return "Relevance";
  }
  return "";
}

std::string_view key_name(Criterion c) {
  switch (c) {
    case Criterion::kCoherence: return "coherence";
    case Criterion::kConsistency: return "consistency";
    case Criterion::kFluency: return "fluency";
    case Criterion::kRelevance: return "relevance";
  }
  return "";
}

std::optional<Criterion> criterion_from_key(std::string_view key) {
  for (Criterion c : kReportCriteria) {
    if (key == key_name(c)) return c;
  }
  return std::nullopt;
}

std::string to_string(const ExampleKey& key) { return key.doc_id + "/" + key.system_id; }

int ExpertRating::get(Criterion c) const {
  switch (c) {
    case Criterion::kCoherence: return coherence;
    case Criterion::kConsistency: return consistency;
    case Criterion::kFluency: return fluency;
    case Criterion::kRelevance: return relevance;
  }
  return 0;
}

double HumanAnnotation::get(Criterion c) const {
  switch (c) {
    case Criterion::kCoherence: return coherence;
    case Criterion::kConsistency: return consistency;
    case Criterion::kFluency: return fluency;
    case Criterion::kRelevance: return relevance;
  }
  return 0.0;
}

const CriterionScore& FusionVerdict::get(Criterion c) const {
  switch (c) {
    case Criterion::kCoherence: return coherence;
    case Criterion::kConsistency: return consistency;
    case Criterion::kFluency: return fluency;
    case Criterion::kRelevance: return relevance;
  }
  return coherence;
}

CriterionScore& FusionVerdict::get(Criterion c) {
  return const_cast<CriterionScore&>(std::as_const(*this).get(c));
}

double overall_from_criteria(const FusionVerdict& verdict) {
  std::array<double, 4> values{};
  for (std::size_t i = 0; i < kReportCriteria.size(); ++i) {
    values[i] = verdict.get(kReportCriteria[i]).value;
  }
  // Summing in sorted order makes the result exactly permutation-invariant;
  // the clamp absorbs rounding so min <= mean <= max holds bit-for-bit.
  std::sort(values.begin(), values.end());
  const double mean = (values[0] + values[1] + values[2] + values[3]) / 4.0;
  return std::clamp(mean, values.front(), values.back());
}

}  // namespace fusion_eval
