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
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fusion_eval/model.hpp"

namespace fusion_eval {

// ---------------------------------------------------------------------------
// Rank correlation. Both throw kInvalidArgument for unequal lengths, n < 2 or
// NaN input, and kDegenerateVector when either side is constant.

// 1-based ranks; tied values share the mean of the positions they occupy.
std::vector<double> average_ranks(std::span<const double> values);

// Pearson correlation of the average-rank vectors.
double spearman(std::span<const double> x, std::span<const double> y);

// Kendall tau-b, O(n log n):
//   (C - D) / sqrt((C + D + Tx) * (C + D + Ty))
// with Tx, Ty the pairs tied only in x, only in y.
double kendall_tau_b(std::span<const double> x, std::span<const double> y);

enum class CorrelationStat { kSpearman, kKendall };

// ---------------------------------------------------------------------------
// Summary-level protocol: correlate across the systems of each document, then
// average over documents.

class ScoreMatrix {
 public:
  struct Document {
    std::vector<std::string> systems;
    std::vector<double> evaluator;
    std::vector<double> human;
  };

  // Throws kDuplicateKey if (doc_id, system_id) was already added.
  void add(const std::string& doc_id, const std::string& system_id, double evaluator_score,
           double human_score);

  const std::map<std::string, Document>& documents() const { return docs_; }
  bool empty() const { return docs_.empty(); }

 private:
  std::map<std::string, Document> docs_;
};

struct SummaryLevelResult {
  std::optional<double> value;  // null when every document was skipped
  std::size_t skipped = 0;      // constant vectors or fewer than two systems
  std::size_t documents = 0;    // documents that contributed
};

// Throws kEmptyMatrix when the matrix has no documents.
SummaryLevelResult summary_level(const ScoreMatrix& matrix, CorrelationStat stat);

// ---------------------------------------------------------------------------
// Table-style report.

struct CorrelationCell {
  std::optional<double> rho;
  std::optional<double> tau;
  std::size_t skipped = 0;
  std::size_t documents = 0;

  bool operator==(const CorrelationCell&) const = default;
};

struct ReportRow {
  std::string evaluator;
  bool reference = false;  // static comparison row, values supplied not computed
  std::map<Criterion, CorrelationCell> cells;
  CorrelationCell avg;
};

struct CorrelationReport {
  std::vector<Criterion> criteria;  // column order
  std::vector<ReportRow> rows;
  std::map<std::string, std::string> metadata;
};

// Per-example scores of one evaluator. Single-score evaluators carry the same
// value under every criterion they are compared on.
using EvaluatorScores = std::map<ExampleKey, std::map<Criterion, double>>;
using HumanScores = std::map<ExampleKey, HumanAnnotation>;

struct StatSelection {
  bool spearman = true;
  bool kendall = true;
};

struct ReportOptions {
  StatSelection stats;
  // Human-annotated examples allowed to be absent from evaluator runs, for
  // instance parse failures. Any other absent key is a KeyMismatch.
  std::set<ExampleKey> excluded;
  std::map<std::string, std::string> metadata;  // merged into the report metadata
};

// One computed row per run, in the given order. Columns are the criteria any
// run scores, in report order; AVG is the mean over a row's non-null cells.
// Throws kKeyMismatch listing the offending (doc, system) pairs.
CorrelationReport build_report(const std::vector<std::pair<std::string, EvaluatorScores>>& runs,
                               const HumanScores& human, const ReportOptions& options = {});

// Static comparison rows, e.g. published numbers:
//   {"rows": [{"evaluator": "...", "cells": {"coherence": {"rho": x, "tau": x|null},
//              ..., "avg": {"rho": x, "tau": x}}}]}
std::vector<ReportRow> load_reference_rows(const std::filesystem::path& path);
std::vector<ReportRow> parse_reference_rows(std::string_view json_text);

// Appends reference rows; their AVG is kept as supplied.
void add_reference_rows(CorrelationReport& report, std::vector<ReportRow> rows);

// evaluator -> criterion -> {rho, tau, skipped, documents}, plus metadata.
std::string report_to_json(const CorrelationReport& report);
// Aligned text table, three decimals, "-" for null cells.
std::string report_to_text(const CorrelationReport& report);

}  // namespace fusion_eval
