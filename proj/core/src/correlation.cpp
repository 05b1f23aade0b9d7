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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "fusion_eval/error.hpp"
#include "fusion_eval/meta_eval.hpp"

namespace fusion_eval {
namespace {

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kInvalidArgument, "vectors differ in length: " +
                                                 std::to_string(x.size()) + " vs " +
                                                 std::to_string(y.size()));
  }
  if (x.size() < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two observations");
  for (auto v : {x, y}) {
    if (std::any_of(v.begin(), v.end(), [](double d) { return std::isnan(d); })) {
      throw Error(ErrorCode::kInvalidArgument, "NaN in correlation input");
    }
  }
  for (auto v : {x, y}) {
    if (std::all_of(v.begin(), v.end(), [&](double d) { return d == v.front(); })) {
      throw Error(ErrorCode::kDegenerateVector, "constant vector");
    }
  }
}

// Number of pairs tied within each run of equal values in a sorted sequence.
template <typename Equal>
std::int64_t tied_pairs(std::size_t n, Equal equal) {
  std::int64_t pairs = 0;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i < n && equal(i - 1, i)) {
      ++run;
    } else {
      pairs += static_cast<std::int64_t>(run) * static_cast<std::int64_t>(run - 1) / 2;
      run = 1;
    }
  }
  return pairs;
}

// Sorts `values` ascending (stable) and returns the number of strict inversions.
std::int64_t merge_count(std::vector<double>& values, std::vector<double>& scratch,
                         std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = merge_count(values, scratch, lo, mid) + merge_count(values, scratch, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (values[j] < values[i]) {
      swaps += static_cast<std::int64_t>(mid - i);
      scratch[k++] = values[j++];
    } else {
      scratch[k++] = values[i++];
    }
  }
  while (i < mid) scratch[k++] = values[i++];
  while (j < hi) scratch[k++] = values[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
            scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            values.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

}  // namespace

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    // Positions i..j-1 (0-based) share rank mean(i+1 .. j).
    const double rank = static_cast<double>(i + 1 + j) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  // Average ranks always have mean (n + 1) / 2.
  const double mean = static_cast<double>(x.size() + 1) / 2.0;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });

  const auto n0 = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  const auto n1 = tied_pairs(n, [&](std::size_t a, std::size_t b) {
    return x[order[a]] == x[order[b]];
  });
  const auto n3 = tied_pairs(n, [&](std::size_t a, std::size_t b) {
    return x[order[a]] == x[order[b]] && y[order[a]] == y[order[b]];
  });

  std::vector<double> ys(n), scratch(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  // With ties in x pre-sorted by y, strict inversions are exactly the
  // discordant pairs.
  const auto discordant = merge_count(ys, scratch, 0, n);
  const auto n2 = tied_pairs(n, [&](std::size_t a, std::size_t b) { return ys[a] == ys[b]; });

  const std::int64_t concordant_minus_discordant = n0 - n1 - n2 + n3 - 2 * discordant;
  const std::int64_t ax = n0 - n1;  // C + D + Tx
  const std::int64_t ay = n0 - n2;  // C + D + Ty
  const double denom = std::sqrt(static_cast<double>(ax) * static_cast<double>(ay));
  return std::clamp(static_cast<double>(concordant_minus_discordant) / denom, -1.0, 1.0);
}

void ScoreMatrix::add(const std::string& doc_id, const std::string& system_id,
                      double evaluator_score, double human_score) {
  auto& doc = docs_[doc_id];
  if (std::find(doc.systems.begin(), doc.systems.end(), system_id) != doc.systems.end()) {
    throw Error(ErrorCode::kDuplicateKey, doc_id + "/" + system_id);
  }
  doc.systems.push_back(system_id);
  doc.evaluator.push_back(evaluator_score);
  doc.human.push_back(human_score);
}

SummaryLevelResult summary_level(const ScoreMatrix& matrix, CorrelationStat stat) {
  if (matrix.empty()) throw Error(ErrorCode::kEmptyMatrix, "no documents");
  SummaryLevelResult result;
  double sum = 0.0;
  for (const auto& [doc_id, doc] : matrix.documents()) {
    if (doc.systems.size() < 2) {
      ++result.skipped;
      continue;
    }
    try {
      sum += stat == CorrelationStat::kSpearman ? spearman(doc.evaluator, doc.human)
                                                : kendall_tau_b(doc.evaluator, doc.human);
      ++result.documents;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerateVector) throw;
      ++result.skipped;
    }
  }
  if (result.documents > 0) result.value = sum / static_cast<double>(result.documents);
  return result;
}

}  // namespace fusion_eval
