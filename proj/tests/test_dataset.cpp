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

#include <array>

#include "fusion_eval/dataset.hpp"
#include "test_support.hpp"

using namespace fusion_eval;
using fusion_eval::testing::thrown_code;

namespace {

std::string record(const std::string& id, const std::string& system, const std::string& annotations) {
  return R"({"id": ")" + id + R"(", "model_id": ")" + system +
         R"(", "text": "An article.", "decoded": "A summary.", "expert_annotations": )" +
         annotations + "}\n";
}

const char* kOneRating = R"([{"coherence": 4, "consistency": 5, "fluency": 3, "relevance": 4}])";

}  // namespace

TEST_SUITE("dataset") {

TEST_CASE("empty input yields no examples") {
  CHECK(parse_dataset("").size() == 0);
  CHECK(parse_dataset("\n\n  \n").size() == 0);
}

TEST_CASE("bundled fixture loads in file order") {
  const auto ds = load_dataset("fixtures/summeval_4.jsonl");
  REQUIRE(ds.size() == 4);
  CHECK(ds.doc_index.size() == 2);
  CHECK(ds.doc_index.at("dm-test-0a1b2c") == std::vector<std::string>{"M11", "M17"});
  CHECK(ds.examples[2].doc_id == "dm-test-3d4e5f");
  CHECK(ds.examples[2].system_id == "M11");
  const auto* ex = ds.find({"dm-test-3d4e5f", "M17"});
  REQUIRE(ex != nullptr);
  REQUIRE(ex->human.has_value());
  CHECK(ex->human->raw_annotations.size() == 3);
  CHECK(ex->human->coherence == doctest::Approx(8.0 / 3.0));
  CHECK(ex->human->consistency == doctest::Approx(4.0 / 3.0));
  CHECK(ds.find({"dm-test-3d4e5f", "M99"}) == nullptr);
}

TEST_CASE("loading is deterministic") {
  const auto a = load_dataset("fixtures/summeval_4.jsonl");
  const auto b = load_dataset("fixtures/summeval_4.jsonl");
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.examples[i].key() == b.examples[i].key());
    CHECK(a.examples[i].source == b.examples[i].source);
    CHECK(a.examples[i].human == b.examples[i].human);
  }
}

TEST_CASE("duplicate keys are rejected with the line number") {
  const auto text = record("d1", "M1", kOneRating) + record("d1", "M2", kOneRating) +
                    record("d1", "M1", kOneRating);
  try {
    parse_dataset(text);
    FAIL("expected DuplicateExample");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDuplicateExample);
    CHECK(e.message().find("line 3") != std::string::npos);
  }
}

TEST_CASE("out-of-range annotation") {
  const auto text = record("d1", "M1", R"([{"coherence": 6, "consistency": 5, "fluency": 3, "relevance": 4}])");
  CHECK(thrown_code([&] { parse_dataset(text); }) == ErrorCode::kOutOfRangeAnnotation);
  const auto zero = record("d1", "M1", R"([{"coherence": 0, "consistency": 5, "fluency": 3, "relevance": 4}])");
  CHECK(thrown_code([&] { parse_dataset(zero); }) == ErrorCode::kOutOfRangeAnnotation);
}

TEST_CASE("malformed records") {
  CHECK(thrown_code([] { parse_dataset("{not json}\n"); }) == ErrorCode::kMalformedRecord);
  CHECK(thrown_code([] { parse_dataset("[1, 2]\n"); }) == ErrorCode::kMalformedRecord);
  CHECK(thrown_code([] { parse_dataset(R"({"id": "d", "model_id": "M", "text": "t"})"); }) ==
        ErrorCode::kMalformedRecord);
  CHECK(thrown_code([] {
          parse_dataset(record("d", "M", R"([{"coherence": 4, "consistency": 5, "fluency": 3}])"));
        }) == ErrorCode::kMalformedRecord);
  CHECK(thrown_code([] {
          parse_dataset(record("d", "M", R"([{"coherence": 4.5, "consistency": 5, "fluency": 3, "relevance": 1}])"));
        }) == ErrorCode::kMalformedRecord);
  CHECK(thrown_code([] { load_dataset("fixtures/does_not_exist.jsonl"); }) ==
        ErrorCode::kFileUnreadable);
}

TEST_CASE("records without annotations carry no human scores") {
  const auto ds = parse_dataset(record("d", "M1", "[]") + record("d", "M2", "null"));
  REQUIRE(ds.size() == 2);
  CHECK_FALSE(ds.examples[0].human.has_value());
  CHECK_FALSE(ds.examples[1].human.has_value());
}

TEST_CASE("aggregate_expert_scores") {
  const std::array<ExpertRating, 1> single{{{4, 5, 3, 4}}};
  const auto one = aggregate_expert_scores(single);
  CHECK(one.coherence == 4.0);
  CHECK(one.consistency == 5.0);
  CHECK(one.fluency == 3.0);
  CHECK(one.relevance == 4.0);

  const std::array<ExpertRating, 3> three{{{4, 1, 1, 1}, {5, 1, 1, 1}, {3, 1, 1, 2}}};
  const auto agg = aggregate_expert_scores(three);
  CHECK(agg.coherence == 4.0);
  CHECK(agg.relevance == doctest::Approx(4.0 / 3.0));

  // Order of ratings does not change the mean bit pattern.
  const std::array<ExpertRating, 3> shuffled{{three[2], three[0], three[1]}};
  CHECK(aggregate_expert_scores(shuffled).relevance == agg.relevance);

  CHECK(thrown_code([] { aggregate_expert_scores({}); }) == ErrorCode::kEmptyAnnotationSet);
}

}  // TEST_SUITE
