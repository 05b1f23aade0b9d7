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

#include <nlohmann/json.hpp>

#include <random>

#include "fusion_eval/meta_eval.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace fusion_eval;
using namespace fusion_eval::testing;

namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, int levels) {
  std::uniform_int_distribution<int> level(0, levels - 1);
  std::uniform_real_distribution<double> any(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = levels > 0 ? level(rng) * 0.5 : any(rng);
  return v;
}

HumanAnnotation human_all(double value) { return {value, value, value, value, {}}; }

}  // namespace

TEST_SUITE("meta_eval") {

TEST_CASE("fixed correlation examples") {
  const std::vector<double> a{1, 2, 3, 4, 5};
  const std::vector<double> rev{5, 4, 3, 2, 1};
  CHECK(spearman(a, a) == 1.0);
  CHECK(kendall_tau_b(a, a) == 1.0);
  CHECK(spearman(a, rev) == -1.0);
  CHECK(kendall_tau_b(a, rev) == -1.0);

  // Hand count: x = (1,2,3), y = (1,3,2): C = 2, D = 1, no ties.
  const std::vector<double> x{1, 2, 3}, y{1, 3, 2};
  CHECK(kendall_tau_b(x, y) == doctest::Approx(1.0 / 3.0));
  // d = (0, 1, -1), rho = 1 - 6 * 2 / (3 * 8) = 0.5
  CHECK(spearman(x, y) == doctest::Approx(0.5));

  // Ties: x = (1,1,2,3), y = (1,2,2,3). C = 4, D = 0, Tx = 1, Ty = 1.
  const std::vector<double> tx{1, 1, 2, 3}, ty{1, 2, 2, 3};
  CHECK(kendall_tau_b(tx, ty) == doctest::Approx(4.0 / 5.0));
  CHECK(spearman(tx, ty) == doctest::Approx(oracle_spearman(tx, ty)));
  CHECK(average_ranks(tx) == std::vector<double>{1.5, 1.5, 3, 4});
}

TEST_CASE("degenerate and invalid inputs") {
  const std::vector<double> flat{2, 2, 2}, ok{1, 2, 3};
  CHECK(thrown_code([&] { spearman(flat, ok); }) == ErrorCode::kDegenerateVector);
  CHECK(thrown_code([&] { kendall_tau_b(ok, flat); }) == ErrorCode::kDegenerateVector);
  const std::vector<double> one{1}, two{1, 2};
  CHECK(thrown_code([&] { spearman(one, one); }) == ErrorCode::kInvalidArgument);
  CHECK(thrown_code([&] { kendall_tau_b(ok, two); }) == ErrorCode::kInvalidArgument);
  const std::vector<double> nan{1, std::nan(""), 3};
  CHECK(thrown_code([&] { spearman(nan, ok); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("average ranks agree with the brute-force definition") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const auto v = random_vector(rng, 1 + trial % 40, trial % 3 == 0 ? 0 : 1 + trial % 6);
    const auto ranks = average_ranks(v);
    CHECK(ranks == oracle_average_ranks(v));
  }
}

TEST_CASE("correlations agree with brute-force oracles") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> length(2, 60);
  int compared = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto n = length(rng);
    const int levels = trial % 4 == 0 ? 0 : 2 + trial % 7;
    const auto x = random_vector(rng, n, levels);
    const auto y = random_vector(rng, n, trial % 5 == 0 ? 0 : 3);
    const bool x_flat = std::all_of(x.begin(), x.end(), [&](double d) { return d == x[0]; });
    const bool y_flat = std::all_of(y.begin(), y.end(), [&](double d) { return d == y[0]; });
    if (x_flat || y_flat) {
      CHECK(thrown_code([&] { spearman(x, y); }) == ErrorCode::kDegenerateVector);
      continue;
    }
    REQUIRE(std::abs(spearman(x, y) - oracle_spearman(x, y)) <= 1e-9);
    REQUIRE(std::abs(kendall_tau_b(x, y) - oracle_kendall_tau_b(x, y)) <= 1e-9);
    ++compared;
  }
  CHECK(compared > 400);
}

TEST_CASE("correlations are symmetric and rank-based") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = random_vector(rng, 12, 4);
    const auto y = random_vector(rng, 12, 0);
    if (std::all_of(x.begin(), x.end(), [&](double d) { return d == x[0]; })) continue;
    CHECK(kendall_tau_b(x, y) == doctest::Approx(kendall_tau_b(y, x)).epsilon(1e-12));
    CHECK(spearman(x, y) == doctest::Approx(spearman(y, x)).epsilon(1e-12));
    // A strictly increasing transform leaves both statistics unchanged.
    std::vector<double> warped(y.size());
    std::transform(y.begin(), y.end(), warped.begin(), [](double v) { return std::exp(3 * v) - 7; });
    CHECK(spearman(x, warped) == spearman(x, y));
    CHECK(kendall_tau_b(x, warped) == kendall_tau_b(x, y));
  }
}

TEST_CASE("summary level protocol") {
  ScoreMatrix identity, reversed;
  for (int d = 0; d < 5; ++d) {
    for (int s = 0; s < 6; ++s) {
      const double human = (s * 7 + d) % 6 + 0.5 * (s % 2);
      identity.add("doc" + std::to_string(d), "M" + std::to_string(s), human, human);
      reversed.add("doc" + std::to_string(d), "M" + std::to_string(s), -human, human);
    }
  }
  for (auto stat : {CorrelationStat::kSpearman, CorrelationStat::kKendall}) {
    const auto id = summary_level(identity, stat);
    CHECK(id.value == 1.0);
    CHECK(id.documents == 5);
    CHECK(id.skipped == 0);
    CHECK(summary_level(reversed, stat).value == -1.0);
  }
}

TEST_CASE("three document fixture with a constant-human document") {
  ScoreMatrix m;
  // doc A: evaluator and human agree on order.
  m.add("A", "M1", 0.1, 1);
  m.add("A", "M2", 0.5, 3);
  m.add("A", "M3", 0.9, 5);
  // doc B: humans gave every system the same score.
  m.add("B", "M1", 0.2, 4);
  m.add("B", "M2", 0.4, 4);
  m.add("B", "M3", 0.6, 4);
  // doc C: one swap. x = (1,2,3) vs y = (1,3,2).
  m.add("C", "M1", 1, 1);
  m.add("C", "M2", 2, 3);
  m.add("C", "M3", 3, 2);

  const auto rho = summary_level(m, CorrelationStat::kSpearman);
  CHECK(rho.skipped == 1);
  CHECK(rho.documents == 2);
  CHECK(*rho.value == doctest::Approx((1.0 + 0.5) / 2));
  const auto tau = summary_level(m, CorrelationStat::kKendall);
  CHECK(*tau.value == doctest::Approx((1.0 + 1.0 / 3.0) / 2));
}

TEST_CASE("all documents degenerate") {
  ScoreMatrix m;
  m.add("A", "M1", 0.1, 2);
  m.add("A", "M2", 0.5, 2);
  m.add("B", "M1", 0.3, 4);  // single system
  const auto r = summary_level(m, CorrelationStat::kKendall);
  CHECK_FALSE(r.value.has_value());
  CHECK(r.skipped == 2);
  CHECK(r.documents == 0);

  CHECK(thrown_code([] { summary_level(ScoreMatrix{}, CorrelationStat::kSpearman); }) ==
        ErrorCode::kEmptyMatrix);
  CHECK(thrown_code([&] { m.add("A", "M1", 0, 0); }) == ErrorCode::kDuplicateKey);
}

TEST_CASE("build_report layout and averages") {
  HumanScores human;
  EvaluatorScores perfect, inverted;
  for (int d = 0; d < 3; ++d) {
    for (int s = 0; s < 4; ++s) {
      const ExampleKey key{"doc" + std::to_string(d), "M" + std::to_string(s)};
      HumanAnnotation h{1.0 + s, 5.0 - s, 1.0 + (s * 3 + d) % 4, 2.0, {}};
      human[key] = h;
      for (Criterion c : kReportCriteria) {
        perfect[key][c] = h.get(c);
        inverted[key][c] = -h.get(c);
      }
    }
  }
  ReportOptions options;
  options.metadata["dataset"] = "synthetic";
  const auto report = build_report({{"Perfect", perfect}, {"Inverted", inverted}}, human, options);
  CHECK(report.criteria == std::vector<Criterion>(kReportCriteria.begin(), kReportCriteria.end()));
  REQUIRE(report.rows.size() == 2);
  const auto& p = report.rows[0];
  CHECK(p.evaluator == "Perfect");
  CHECK(p.cells.at(Criterion::kCoherence).rho == 1.0);
  CHECK(p.cells.at(Criterion::kFluency).tau == 1.0);
  // Relevance is constant for every document: all skipped, null cell.
  CHECK_FALSE(p.cells.at(Criterion::kRelevance).rho.has_value());
  CHECK(p.cells.at(Criterion::kRelevance).skipped == 3);
  CHECK(p.avg.rho == 1.0);
  CHECK(report.rows[1].avg.tau == -1.0);
  CHECK(report.metadata.at("dataset") == "synthetic");
  CHECK(report.metadata.at("kendall_variant") == "tau-b");

  const auto j = nlohmann::json::parse(report_to_json(report));
  CHECK(j["columns"] == nlohmann::json{"coherence", "consistency", "fluency", "relevance"});
  CHECK(j["rows"][0]["cells"]["relevance"]["rho"].is_null());
  CHECK(j["rows"][0]["cells"]["relevance"]["skipped"] == 3);
  CHECK(j["rows"][0]["cells"]["avg"]["rho"] == 1.0);
  CHECK(j["rows"][1]["source"] == "computed");

  options.stats.kendall = false;
  const auto rho_only = build_report({{"Perfect", perfect}}, human, options);
  CHECK_FALSE(rho_only.rows[0].cells.at(Criterion::kCoherence).tau.has_value());
  CHECK(rho_only.metadata.at("stats") == "spearman");
}

TEST_CASE("single criterion, single evaluator") {
  HumanScores human;
  EvaluatorScores only_fluency;
  for (int s = 0; s < 3; ++s) {
    const ExampleKey key{"d", "M" + std::to_string(s)};
    human[key] = human_all(1.0 + s);
    only_fluency[key][Criterion::kFluency] = 10.0 - s;
  }
  const auto report = build_report({{"X", only_fluency}}, human);
  CHECK(report.criteria == std::vector<Criterion>{Criterion::kFluency});
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].avg.rho == -1.0);
  const auto text = report_to_text(report);
  CHECK(text.find("Fluency") != std::string::npos);
  CHECK(text.find("Coherence") == std::string::npos);
  CHECK(text.find("-1.000") != std::string::npos);
}

TEST_CASE("key alignment") {
  HumanScores human;
  human[{"d", "M1"}] = human_all(1);
  human[{"d", "M2"}] = human_all(2);
  EvaluatorScores partial;
  partial[{"d", "M1"}][Criterion::kCoherence] = 1;
  CHECK(thrown_code([&] { build_report({{"P", partial}}, human); }) == ErrorCode::kKeyMismatch);
  ReportOptions options;
  options.excluded.insert({"d", "M2"});
  CHECK(thrown_code([&] { build_report({{"P", partial}}, human, options); }) == std::nullopt);

  EvaluatorScores extra = partial;
  extra[{"d", "M2"}][Criterion::kCoherence] = 2;
  extra[{"d", "M3"}][Criterion::kCoherence] = 3;
  try {
    build_report({{"E", extra}}, human);
    FAIL("expected KeyMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kKeyMismatch);
    CHECK(e.message() == "d/M3");
  }
}

TEST_CASE("reference rows") {
  const auto rows = parse_reference_rows(R"({"rows": [
    {"evaluator": "Ref", "cells": {"coherence": {"rho": 0.5, "tau": null},
                                   "avg": {"rho": 0.25, "tau": 0.125}}}]})");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].reference);
  CHECK(rows[0].cells.at(Criterion::kCoherence).rho == 0.5);
  CHECK_FALSE(rows[0].cells.at(Criterion::kCoherence).tau.has_value());
  CHECK(rows[0].avg.tau == 0.125);

  CorrelationReport report;
  add_reference_rows(report, rows);
  CHECK(report.criteria.size() == 4);
  const auto text = report_to_text(report);
  CHECK(text.find("Ref [ref]") != std::string::npos);
  CHECK(text.find("0.250") != std::string::npos);

  CHECK(thrown_code([] { parse_reference_rows(R"({"rows": [{"evaluator": "x", "cells": {"style": {}}}]})"); }) ==
        ErrorCode::kMalformedRecord);
  CHECK(thrown_code([] { parse_reference_rows("[]"); }) == ErrorCode::kMalformedRecord);
}

TEST_CASE("shipped reference table") {
  const auto rows = load_reference_rows(FUSION_EVAL_PUBLISHED_FILE);
  const auto fusion = std::find_if(rows.begin(), rows.end(), [](const ReportRow& r) {
    return r.evaluator.rfind("FusionEval", 0) == 0;
  });
  REQUIRE(fusion != rows.end());
  CHECK(fusion->avg.rho == 0.960);
  CHECK(fusion->avg.tau == 0.879);
  for (const auto& row : rows) CHECK(row.cells.size() == 4);
}

}  // TEST_SUITE
