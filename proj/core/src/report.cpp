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

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>

#include "fusion_eval/error.hpp"
#include "fusion_eval/meta_eval.hpp"
#include "io_util.hpp"

namespace fusion_eval {
namespace {

using nlohmann::json;

constexpr std::size_t kMaxListedKeys = 20;

std::string list_keys(const std::vector<ExampleKey>& keys) {
  std::string out;
  for (std::size_t i = 0; i < keys.size() && i < kMaxListedKeys; ++i) {
    if (i) out += ", ";
    out += to_string(keys[i]);
  }
  if (keys.size() > kMaxListedKeys) out += fmt::format(", ... ({} total)", keys.size());
  return out;
}

std::optional<double> mean_of(const std::vector<std::optional<double>>& values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& cell, const char* key) {
  auto it = cell.find(key);
  if (it == cell.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw Error(ErrorCode::kMalformedRecord, std::string(key) + " is not a number");
  return it->get<double>();
}

std::string fmt_cell(const std::optional<double>& v) {
  return v ? fmt::format("{:.3f}", *v) : std::string("-");
}

}  // namespace

CorrelationReport build_report(const std::vector<std::pair<std::string, EvaluatorScores>>& runs,
                               const HumanScores& human, const ReportOptions& options) {
  // Alignment: every evaluated key needs a human score, and every human key
  // must be evaluated unless explicitly excluded.
  std::vector<ExampleKey> offenders;
  for (const auto& [name, scores] : runs) {
    for (const auto& [key, _] : scores) {
      if (!human.contains(key)) offenders.push_back(key);
    }
    for (const auto& [key, _] : human) {
      if (!scores.contains(key) && !options.excluded.contains(key)) offenders.push_back(key);
    }
  }
  if (!offenders.empty()) {
    std::sort(offenders.begin(), offenders.end());
    offenders.erase(std::unique(offenders.begin(), offenders.end()), offenders.end());
    throw Error(ErrorCode::kKeyMismatch, list_keys(offenders));
  }

  CorrelationReport report;
  for (Criterion c : kReportCriteria) {
    const bool used = std::any_of(runs.begin(), runs.end(), [&](const auto& run) {
      return std::any_of(run.second.begin(), run.second.end(),
                         [&](const auto& entry) { return entry.second.contains(c); });
    });
    if (used) report.criteria.push_back(c);
  }

  for (const auto& [name, scores] : runs) {
    ReportRow row;
    row.evaluator = name;
    std::vector<std::optional<double>> rhos, taus;
    for (Criterion c : report.criteria) {
      ScoreMatrix matrix;
      for (const auto& [key, per_criterion] : scores) {
        if (auto it = per_criterion.find(c); it != per_criterion.end()) {
          matrix.add(key.doc_id, key.system_id, it->second, human.at(key).get(c));
        }
      }
      CorrelationCell cell;
      if (!matrix.empty()) {
        if (options.stats.spearman) {
          auto r = summary_level(matrix, CorrelationStat::kSpearman);
          cell.rho = r.value;
          cell.skipped = r.skipped;
          cell.documents = r.documents;
        }
        if (options.stats.kendall) {
          auto r = summary_level(matrix, CorrelationStat::kKendall);
          cell.tau = r.value;
          cell.skipped = r.skipped;
          cell.documents = r.documents;
        }
      }
      rhos.push_back(cell.rho);
      taus.push_back(cell.tau);
      row.cells.emplace(c, cell);
    }
    row.avg.rho = mean_of(rhos);
    row.avg.tau = mean_of(taus);
    report.rows.push_back(std::move(row));
  }

  std::string stats;
  if (options.stats.spearman) stats = "spearman";
  if (options.stats.kendall) stats += stats.empty() ? "kendall_tau_b" : ",kendall_tau_b";
  report.metadata = {
      {"protocol", "summary-level: per-document correlation across systems, mean over documents"},
      {"stats", stats},
      {"kendall_variant", "tau-b"},
      {"ties", "average ranks (spearman), tie-corrected denominator (kendall)"},
      {"degenerate_documents", "skipped and counted (constant vector or fewer than 2 systems)"},
      {"avg", "mean over non-null criterion cells"},
      {"excluded_examples", std::to_string(options.excluded.size())},
  };
  for (const auto& [k, v] : options.metadata) report.metadata[k] = v;
  return report;
}

std::vector<ReportRow> parse_reference_rows(std::string_view json_text) {
  std::vector<ReportRow> rows;
  try {
    const auto j = json::parse(json_text);
    for (const auto& r : j.at("rows")) {
      ReportRow row;
      row.evaluator = r.at("evaluator").get<std::string>();
      row.reference = true;
      for (const auto& [key, cell] : r.at("cells").items()) {
        CorrelationCell c{read_optional(cell, "rho"), read_optional(cell, "tau"), 0, 0};
        if (key == "avg") {
          row.avg = c;
        } else if (auto crit = criterion_from_key(key)) {
          row.cells.emplace(*crit, c);
        } else {
          throw Error(ErrorCode::kMalformedRecord, "unknown criterion '" + key + "'");
        }
      }
      rows.push_back(std::move(row));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedRecord, std::string("reference rows: ") + e.what());
  }
  return rows;
}

std::vector<ReportRow> load_reference_rows(const std::filesystem::path& path) {
  return parse_reference_rows(detail::read_file(path));
}

void add_reference_rows(CorrelationReport& report, std::vector<ReportRow> rows) {
  if (report.criteria.empty()) {
    for (Criterion c : kReportCriteria) report.criteria.push_back(c);
  }
  for (auto& row : rows) {
    row.reference = true;
    report.rows.push_back(std::move(row));
  }
}

std::string report_to_json(const CorrelationReport& report) {
  json columns = json::array();
  for (Criterion c : report.criteria) columns.push_back(key_name(c));
  json rows = json::array();
  for (const auto& row : report.rows) {
    json cells = json::object();
    for (Criterion c : report.criteria) {
      auto it = row.cells.find(c);
      const CorrelationCell cell = it == row.cells.end() ? CorrelationCell{} : it->second;
      json out = {{"rho", optional_number(cell.rho)}, {"tau", optional_number(cell.tau)}};
      if (!row.reference) {
        out["skipped"] = cell.skipped;
        out["documents"] = cell.documents;
      }
      cells[std::string(key_name(c))] = std::move(out);
    }
    cells["avg"] = {{"rho", optional_number(row.avg.rho)}, {"tau", optional_number(row.avg.tau)}};
    rows.push_back({{"evaluator", row.evaluator},
                    {"source", row.reference ? "reference" : "computed"},
                    {"cells", std::move(cells)}});
  }
  json j = {{"metadata", report.metadata}, {"columns", columns}, {"rows", rows}};
  return j.dump(2) + "\n";
}

std::string report_to_text(const CorrelationReport& report) {
  constexpr int kValueWidth = 7;
  std::size_t name_width = std::string_view("Evaluator").size();
  for (const auto& row : report.rows) {
    name_width = std::max(name_width, row.evaluator.size() + (row.reference ? 6 : 0));
  }
  name_width += 2;
  const int group_width = 2 * kValueWidth;

  std::string out = fmt::format("{:<{}}", "", name_width);
  for (Criterion c : report.criteria) out += fmt::format("{:<{}}", display_name(c), group_width);
  out += fmt::format("{:<{}}", "AVG", group_width);
  while (!out.empty() && out.back() == ' ') out.pop_back();
  out += "\n";

  std::string sub = fmt::format("{:<{}}", "Evaluator", name_width);
  for (std::size_t i = 0; i <= report.criteria.size(); ++i) {
    sub += fmt::format("{:<{}}{:<{}}", "rho", kValueWidth, "tau", kValueWidth);
  }
  while (!sub.empty() && sub.back() == ' ') sub.pop_back();
  out += sub + "\n";
  const std::size_t rule = name_width + static_cast<std::size_t>(group_width) * (report.criteria.size() + 1);
  out += std::string(rule, '-') + "\n";

  bool in_reference = false;
  for (const auto& row : report.rows) {
    if (row.reference && !in_reference && &row != &report.rows.front()) {
      out += std::string(rule, '-') + "\n";
    }
    in_reference = row.reference;
    std::string line = fmt::format("{:<{}}", row.evaluator + (row.reference ? " [ref]" : ""),
                                   name_width);
    for (Criterion c : report.criteria) {
      auto it = row.cells.find(c);
      const CorrelationCell cell = it == row.cells.end() ? CorrelationCell{} : it->second;
      line += fmt::format("{:<{}}{:<{}}", fmt_cell(cell.rho), kValueWidth, fmt_cell(cell.tau),
                          kValueWidth);
    }
    line += fmt::format("{:<{}}{:<{}}", fmt_cell(row.avg.rho), kValueWidth, fmt_cell(row.avg.tau),
                        kValueWidth);
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
  }
  out += std::string(rule, '-') + "\n";
  out += "rho: Spearman, tau: Kendall tau-b; summary-level (per document, averaged)\n";
  return out;
}

}  // namespace fusion_eval
