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

#include <doctest.h>

#include <algorithm>
#include <random>

#include "fusion_eval/model.hpp"

using namespace fusion_eval;

namespace {

FusionVerdict with_scores(double coh, double con, double flu, double rel) {
  FusionVerdict v;
  v.coherence.value = coh;
  v.consistency.value = con;
  v.fluency.value = flu;
  v.relevance.value = rel;
  return v;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("overall_from_criteria on fixed examples") {
  CHECK(overall_from_criteria(with_scores(5, 5, 5, 5)) == 5.0);
  CHECK(overall_from_criteria(with_scores(1, 1, 1, 1)) == 1.0);
  CHECK(overall_from_criteria(with_scores(4, 5, 3, 4)) == 4.0);
  CHECK(overall_from_criteria(with_scores(1, 2, 2, 2)) == 1.75);
}

TEST_CASE("overall_from_criteria is permutation invariant and bounded") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> dist(1.0, 5.0);
  for (int trial = 0; trial < 2000; ++trial) {
    std::array<double, 4> values{dist(rng), dist(rng), dist(rng), dist(rng)};
    if (trial % 3 == 0) values[1] = values[2] = values[0];
    const double first = overall_from_criteria(with_scores(values[0], values[1], values[2], values[3]));
    auto sorted = values;
    std::sort(sorted.begin(), sorted.end());
    REQUIRE(first >= sorted.front());
    REQUIRE(first <= sorted.back());
    do {
      REQUIRE(overall_from_criteria(with_scores(sorted[0], sorted[1], sorted[2], sorted[3])) == first);
    } while (std::next_permutation(sorted.begin(), sorted.end()));
  }
}

TEST_CASE("criterion names and orders") {
  CHECK(display_name(Criterion::kConsistency) == "Consistency");
  CHECK(key_name(Criterion::kFluency) == "fluency");
  for (Criterion c : kReportCriteria) CHECK(criterion_from_key(key_name(c)) == c);
  CHECK_FALSE(criterion_from_key("Coherence").has_value());
  CHECK_FALSE(criterion_from_key("overall").has_value());
  CHECK(kTemplateCriteria[2] == Criterion::kRelevance);
  CHECK(kReportCriteria[2] == Criterion::kFluency);
}

TEST_CASE("verdict accessors address the named fields") {
  FusionVerdict v;
  v.get(Criterion::kRelevance).value = 3.5;
  v.get(Criterion::kCoherence).explanation = "ok";
  CHECK(v.relevance.value == 3.5);
  CHECK(v.coherence.explanation == "ok");
  ExpertRating r{1, 2, 3, 4};
  CHECK(r.get(Criterion::kFluency) == 3);
  CHECK(r.get(Criterion::kRelevance) == 4);
}

TEST_CASE("example keys order by document then system") {
  ExampleKey a{"d1", "M9"}, b{"d1", "M10"}, c{"d2", "M0"};
  CHECK(b < a);  // lexicographic on the id strings
  CHECK(a < c);
  CHECK(to_string(a) == "d1/M9");
}

}  // TEST_SUITE
