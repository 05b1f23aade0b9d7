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

#include <algorithm>
#include <charconv>
#include <cmath>

#include "fusion_eval/hashing.hpp"
#include "fusion_eval/llm_client.hpp"
#include "io_util.hpp"

namespace fusion_eval {
namespace {

std::optional<double> number_after_label(std::string_view prompt, std::string_view label) {
  // Labels must start a line; "Bleurt Score" must not match inside "SumBleurt Score".
  std::size_t pos = prompt.rfind(label);
  while (pos != std::string_view::npos && pos != 0 && prompt[pos - 1] != '\n') {
    pos = prompt.rfind(label, pos - 1);
  }
  if (pos == std::string_view::npos) return std::nullopt;
  auto rest = prompt.substr(pos + label.size());
  const auto nl = rest.find('\n');
  if (nl == std::string_view::npos) return std::nullopt;
  rest = rest.substr(nl + 1);
  const auto line = detail::trim(rest.substr(0, rest.find('\n')));
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
  if (ec != std::errc{} || ptr != line.data() + line.size()) return std::nullopt;
  return value;
}

double to_five_point(double unit) {
  const double scaled = 1.0 + 4.0 * std::clamp(unit, 0.0, 1.0);
  return std::clamp(std::round(scaled * 2.0) / 2.0, kMinScore, kMaxScore);
}

double hashed_unit(std::string_view prompt, std::string_view salt) {
  std::string key(salt);
  key.push_back('\x1f');
  key.append(prompt);
  return static_cast<double>(fnv1a64(key)) / 18446744073709551616.0;
}

void append_section(std::string& out, std::string_view header, const CriterionScore& s) {
  out += header;
  out += "\nScore: " + detail::format_shortest(s.value) + " Explanation: " + s.explanation + "\n\n";
}

}  // namespace

std::string emit_canonical(const FusionVerdict& v) {
  std::string out = "Criterias' Scores and Explanations:\n\n";
  for (Criterion c : kTemplateCriteria) append_section(out, display_name(c), v.get(c));
  out += "Evaluation Summary:\nOverall Score: " + detail::format_shortest(v.overall.value) +
         "\nExplanation: " + v.overall.explanation + "\n";
  return out;
}

std::optional<AssistantScoreSet> extract_prompt_scores(std::string_view prompt) {
  const auto nli = number_after_label(prompt, "NLI Score (Source as Premise and Answer as Hypothesis):");
  const auto bleurt =
      number_after_label(prompt, "Bleurt Score (Source as Premise and Answer as Hypothesis):");
  const auto sum_bleurt =
      number_after_label(prompt, "SumBleurt Score (Source as Premise and Answer as Hypothesis):");
  if (!nli || !bleurt || !sum_bleurt) return std::nullopt;
  return AssistantScoreSet{*nli, *bleurt, *sum_bleurt};
}

FusionVerdict default_mock_oracle(const LlmRequest& req) {
  FusionVerdict v;
  if (const auto s = extract_prompt_scores(req.prompt)) {
    v.coherence = {to_five_point(s->sum_bleurt),
                   fmt::format("Mock judgment from SumBleurt {:.3f}.", s->sum_bleurt)};
    v.consistency = {to_five_point(s->nli), fmt::format("Mock judgment from NLI {:.3f}.", s->nli)};
    v.relevance = {to_five_point((s->bleurt + s->sum_bleurt) / 2.0),
                   fmt::format("Mock judgment from Bleurt {:.3f} and SumBleurt {:.3f}.", s->bleurt,
                               s->sum_bleurt)};
    v.fluency = {to_five_point(s->bleurt),
                 fmt::format("Mock judgment from Bleurt {:.3f}.", s->bleurt)};
  } else {
    for (Criterion c : kTemplateCriteria) {
      v.get(c) = {to_five_point(hashed_unit(req.prompt, key_name(c))),
                  "Mock judgment; the prompt carries no assistant scores."};
    }
  }
  v.overall = {overall_from_criteria(v), "Mean of the four criterion scores."};
  return v;
}

std::string mock_complete(const LlmRequest& req, const VerdictOracle& oracle) {
  return emit_canonical(oracle(req));
}

MockBackend::MockBackend(VerdictOracle oracle) : oracle_(std::move(oracle)) {}

std::string MockBackend::complete(const LlmRequest& req) {
  req.validate();
  return mock_complete(req, oracle_);
}

}  // namespace fusion_eval
