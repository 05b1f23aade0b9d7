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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "fusion_eval/error.hpp"
#include "fusion_eval/model.hpp"

namespace fusion_eval::testing {

// The Output Template section as it must appear in the canonical template.
inline constexpr std::string_view kOutputTemplate =
    "**Output Template**:\n"
    "Criterias' Scores and Explanations:\n"
    "\n"
    "Coherence\n"
    "Score: [Your evaluation] Explanation: [Your explanation on evaluation]\n"
    "\n"
    "Consistency\n"
    "Score: [Your evaluation] Explanation: [Your explanation on evaluation]\n"
    "\n"
    "Relevance\n"
    "Score: [Your evaluation] Explanation:[Your explanation on evaluation]\n"
    "\n"
    "Fluency\n"
    "Score: [Your evaluation] Explanation: [Your explanation on evaluation]\n"
    "\n"
    "Evaluation Summary:\n"
    "Overall Score: [Your evaluation]\n"
    "Explanation: [Your explanation on evaluation]\n";

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() /
            ("fusion_eval_test_" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, std::string_view text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// The ErrorCode thrown by fn, or nullopt if it did not throw an Error.
template <typename Fn>
std::optional<ErrorCode> thrown_code(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

// Random verdict: values on a mix of grids and arbitrary doubles in [1,5],
// explanations from a vocabulary that never forms a section header.
inline FusionVerdict random_verdict(std::mt19937_64& rng) {
  static const std::vector<std::string> kWords = {
      "the",     "summary",  "covers",   "main",     "points",  "but",     "misses",
      "detail",  "reads",    "smoothly", "with",     "minor",   "grammar", "slips",
      "facts",   "match",    "article",  "order",    "is",      "logical", "clear",
      "weak",    "strong",   "coherent", "relevant", "(mostly)", "4",      "2.5",
      "quotes:", "-",        "[ok]",     "{brace}",  "50%",     "well",    "organized"};
  std::uniform_int_distribution<int> grid(0, 3);
  std::uniform_int_distribution<int> steps(0, 8);
  std::uniform_real_distribution<double> any(1.0, 5.0);
  std::uniform_int_distribution<std::size_t> word(0, kWords.size() - 1);
  std::uniform_int_distribution<int> length(1, 14);
  std::bernoulli_distribution newline(0.08);

  auto value = [&] {
    switch (grid(rng)) {
      case 0: return 1.0 + steps(rng) * 0.5;
      case 1: return static_cast<double>(1 + steps(rng) / 2);
      case 2: return std::round(any(rng) * 100.0) / 100.0;
      default: return any(rng);
    }
  };
  auto explanation = [&] {
    std::string text = kWords[word(rng)];
    if (text == "-" || text == "4" || text == "2.5") text = "overall";
    const int n = length(rng);
    for (int i = 1; i < n; ++i) text += (newline(rng) ? "\n" : " ") + kWords[word(rng)];
    return text;
  };
  FusionVerdict v;
  for (Criterion c : kTemplateCriteria) v.get(c) = {value(), explanation()};
  v.overall = {value(), explanation()};
  return v;
}

}  // namespace fusion_eval::testing
