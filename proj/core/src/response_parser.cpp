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

#include "fusion_eval/response_parser.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <regex>

#include "fusion_eval/error.hpp"
#include "io_util.hpp"

namespace fusion_eval {
namespace {

struct SectionSpec {
  std::string_view name;          // canonical name, used in errors
  std::string_view exact_header;  // Output Template line
  std::optional<Criterion> criterion;
};

// Output Template order; index 4 is the overall summary.
constexpr std::array<SectionSpec, 5> kSections = {{
    {"Coherence", "Coherence", Criterion::kCoherence},
    {"Consistency", "Consistency", Criterion::kConsistency},
    {"Relevance", "Relevance", Criterion::kRelevance},
    {"Fluency", "Fluency", Criterion::kFluency},
    {"Evaluation Summary", "Evaluation Summary:", std::nullopt},
}};
constexpr std::size_t kSummaryIndex = 4;

constexpr std::string_view kPreamble = "criterias' scores and explanations";

struct HeaderMatch {
  std::size_t section;
  std::string_view rule;
  std::string inline_rest;  // for inline headers, the text after the name
};

const std::regex& list_marker_re() {
  static const std::regex re(R"(^(\d+[.)]|[-+•])\s+)");
  return re;
}

const std::regex& scale_suffix_re() {
  static const std::regex re(R"(\s*\(\s*1\s*(-|–|to)\s*5\s*\)\s*$)", std::regex::icase);
  return re;
}

std::string strip_markup(std::string_view line) {
  std::string s;
  for (char c : detail::trim(line)) {
    if (c != '*' && c != '#' && c != '_' && c != '`') s.push_back(c);
  }
  s = std::string(detail::trim(s));
  s = std::regex_replace(s, list_marker_re(), "", std::regex_constants::format_first_only);
  while (!s.empty() && (s.back() == ':' || std::isspace(static_cast<unsigned char>(s.back())))) {
    s.pop_back();
  }
  s = std::regex_replace(s, scale_suffix_re(), "");
  while (!s.empty() && (s.back() == ':' || std::isspace(static_cast<unsigned char>(s.back())))) {
    s.pop_back();
  }
  return s;
}

std::optional<HeaderMatch> match_header(std::string_view line) {
  for (std::size_t i = 0; i < kSections.size(); ++i) {
    if (line == kSections[i].exact_header) return HeaderMatch{i, "exact", {}};
  }
  const auto lowered = detail::to_lower(detail::trim(line));
  for (std::size_t i = 0; i < kSections.size(); ++i) {
    if (lowered == detail::to_lower(kSections[i].exact_header)) {
      return HeaderMatch{i, "case-insensitive", {}};
    }
  }
  const auto stripped = detail::to_lower(strip_markup(line));
  for (std::size_t i = 0; i < kSections.size(); ++i) {
    if (stripped == detail::to_lower(kSections[i].name)) {
      return HeaderMatch{i, "markup-stripped", {}};
    }
  }

  // "Name: Score: 4 ..." / "Name (1-5): 4/5 ...". Markup is dropped but the
  // trailing colon is not, so work on a lighter strip here.
  std::string light;
  for (char c : detail::trim(line)) {
    if (c != '*' && c != '#' && c != '`') light.push_back(c);
  }
  light = std::regex_replace(std::string(detail::trim(light)), list_marker_re(), "",
                             std::regex_constants::format_first_only);
  static const std::regex inline_re(
      R"(^(coherence|consistency|relevance|fluency|evaluation summary)\s*(\(\s*1\s*(-|–|to)\s*5\s*\))?\s*[:\-]\s*((score|overall score|\d).*)$)",
      std::regex::icase);
  std::smatch m;
  if (std::regex_match(light, m, inline_re)) {
    const auto name = detail::to_lower(m[1].str());
    for (std::size_t i = 0; i < kSections.size(); ++i) {
      if (name == detail::to_lower(kSections[i].name)) {
        return HeaderMatch{i, "inline header", m[4].str()};
      }
    }
  }
  return std::nullopt;
}

struct Section {
  std::size_t index;
  std::string body;
};

struct NumberHit {
  double value;
  bool had_out_of_five;
};

// Numbers in a score slot; "n/5" counts as n.
std::vector<NumberHit> numbers_in(std::string_view slot) {
  static const std::regex number_re(R"((\d+(?:\.\d+)?)(\s*/\s*5(?:\.0+)?(?!\.?\d))?)");
  std::vector<NumberHit> hits;
  const std::string text(slot);
  for (auto it = std::sregex_iterator(text.begin(), text.end(), number_re);
       it != std::sregex_iterator(); ++it) {
    const auto digits = (*it)[1].str();
    double value = 0.0;
    std::from_chars(digits.data(), digits.data() + digits.size(), value);
    hits.push_back({value, (*it)[2].matched});
  }
  return hits;
}

CriterionScore parse_section(const SectionSpec& spec, std::string_view body,
                             ParseDiagnostics& diag) {
  const std::string name(spec.name);
  const std::string text(body);

  static const std::regex explanation_re(R"(\**\s*explanation\s*\**\s*:\s*\**)",
                                         std::regex::icase);
  static const std::regex score_label_re(R"(\b(overall\s+)?score\b\s*\**\s*[:=]?)", std::regex::icase);

  std::smatch expl;
  const bool has_expl_label = std::regex_search(text, expl, explanation_re);
  const std::size_t slot_limit =
      has_expl_label ? static_cast<std::size_t>(expl.position(0)) : text.size();
  const std::string slot_region = text.substr(0, slot_limit);

  // Each label's slot runs to the next label, the end of its line or the
  // explanation label, whichever comes first.
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  for (auto it = std::sregex_iterator(slot_region.begin(), slot_region.end(), score_label_re);
       it != std::sregex_iterator(); ++it) {
    const auto start = static_cast<std::size_t>(it->position(0) + it->length(0));
    slots.emplace_back(start, slot_region.size());
    if (slots.size() > 1) {
      auto& prev = slots[slots.size() - 2];
      prev.second = std::min(prev.second, static_cast<std::size_t>(it->position(0)));
    }
  }
  for (auto& [start, end] : slots) {
    const auto nl = slot_region.find('\n', start);
    if (nl != std::string::npos) end = std::min(end, nl);
  }

  std::size_t score_line_end = 0;
  std::vector<NumberHit> hits;
  if (slots.empty()) {
    // Bare number leading the section, e.g. "Coherence: 4/5 - reads well".
    // The explanation may follow on the same line.
    const auto lead = slot_region.find_first_not_of(" \t\r\n");
    score_line_end = slot_region.size();
    if (lead != std::string::npos) {
      static const std::regex lead_re(R"(^\d+(?:\.\d+)?(\s*/\s*5(?:\.0+)?(?!\.?\d))?)");
      std::smatch m;
      const std::string rest = slot_region.substr(lead);
      if (std::regex_search(rest, m, lead_re)) {
        hits = numbers_in(m[0].str());
        score_line_end = lead + static_cast<std::size_t>(m.length(0));
        diag.recovered_with_tolerance.emplace_back(name, "bare score");
      }
    }
  } else {
    for (const auto& [start, end] : slots) {
      auto h = numbers_in(std::string_view(slot_region).substr(start, end - start));
      hits.insert(hits.end(), h.begin(), h.end());
      score_line_end = std::max(score_line_end, end);
    }
  }

  if (hits.empty()) throw Error(ErrorCode::kNoScoreFound, name);
  for (const auto& h : hits) {
    if (h.value != hits.front().value) {
      throw Error(ErrorCode::kMultipleScores,
                  fmt::format("{}: {} and {}", name, detail::format_shortest(hits.front().value),
                              detail::format_shortest(h.value)));
    }
  }
  if (std::any_of(hits.begin(), hits.end(), [](const NumberHit& h) { return h.had_out_of_five; })) {
    diag.recovered_with_tolerance.emplace_back(name, "'/5' suffix");
  }
  const double value = hits.front().value;
  if (!(value >= kMinScore && value <= kMaxScore)) {
    throw Error(ErrorCode::kScoreOutOfRange,
                fmt::format("{}: {}", name, detail::format_shortest(value)));
  }

  std::string explanation;
  if (has_expl_label) {
    explanation = std::string(detail::trim(
        std::string_view(text).substr(static_cast<std::size_t>(expl.position(0) + expl.length(0)))));
  } else {
    const auto after = score_line_end < text.size() ? std::string_view(text).substr(score_line_end)
                                                    : std::string_view{};
    const auto body_start = after.find_first_not_of(" \t\r\n-:;,.");
    explanation = body_start == std::string_view::npos
                      ? std::string()
                      : std::string(detail::trim(after.substr(body_start)));
    if (!explanation.empty()) diag.recovered_with_tolerance.emplace_back(name, "unlabelled explanation");
  }
  if (explanation.empty()) throw Error(ErrorCode::kNoExplanationFound, name);
  return {value, std::move(explanation)};
}

}  // namespace

ParsedVerdict parse_verdict(std::string_view response) {
  if (detail::trim(response).empty()) throw Error(ErrorCode::kInvalidArgument, "empty response");

  ParsedVerdict out;
  auto& diag = out.diagnostics;
  std::array<std::optional<Section>, kSections.size()> sections;
  std::string* sink = &diag.residual_text;  // where body lines currently go
  std::string discarded;

  std::size_t pos = 0;
  while (pos <= response.size()) {
    auto end = response.find('\n', pos);
    if (end == std::string_view::npos) end = response.size();
    auto line = response.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    if (auto header = match_header(line)) {
      auto& slot = sections[header->section];
      const std::string name(kSections[header->section].name);
      if (slot) {
        diag.warnings.push_back("duplicate section '" + name + "' ignored");
        sink = &diag.residual_text;
        *sink += std::string(line) + "\n";
        continue;
      }
      slot = Section{header->section, header->inline_rest};
      if (!header->inline_rest.empty()) slot->body += "\n";
      diag.matched_sections.push_back(name);
      if (header->rule != "exact") diag.recovered_with_tolerance.emplace_back(name, header->rule);
      sink = &slot->body;
      continue;
    }
    if (sink == &diag.residual_text && detail::to_lower(strip_markup(line)) == kPreamble) continue;
    *sink += std::string(line) + "\n";
  }
  diag.residual_text = std::string(detail::trim(diag.residual_text));

  for (std::size_t i = 0; i < kSections.size(); ++i) {
    if (!sections[i]) throw Error(ErrorCode::kMissingSection, std::string(kSections[i].name));
  }
  for (std::size_t i = 0; i < kSections.size(); ++i) {
    auto score = parse_section(kSections[i], sections[i]->body, diag);
    if (i == kSummaryIndex) {
      out.verdict.overall = std::move(score);
    } else {
      out.verdict.get(*kSections[i].criterion) = std::move(score);
    }
  }
  out.verdict.raw_response = std::string(response);

  auto warnings = validate_verdict(out.verdict);
  diag.warnings.insert(diag.warnings.end(), warnings.begin(), warnings.end());
  return out;
}

std::vector<std::string> validate_verdict(const FusionVerdict& verdict) {
  auto check = [](std::string_view name, const CriterionScore& s) {
    if (!std::isfinite(s.value) || s.value < kMinScore || s.value > kMaxScore) {
      throw Error(ErrorCode::kScoreOutOfRange,
                  fmt::format("{}: {}", name, detail::format_shortest(s.value)));
    }
  };
  for (Criterion c : kTemplateCriteria) check(display_name(c), verdict.get(c));
  check("Evaluation Summary", verdict.overall);

  std::vector<std::string> warnings;
  const double mean = overall_from_criteria(verdict);
  if (std::abs(verdict.overall.value - mean) > kOverallDriftTolerance) {
    warnings.push_back(fmt::format("overall score {} differs from criterion mean {} by more than {}",
                                   detail::format_shortest(verdict.overall.value),
                                   detail::format_shortest(mean),
                                   detail::format_shortest(kOverallDriftTolerance)));
  }
  return warnings;
}

}  // namespace fusion_eval
