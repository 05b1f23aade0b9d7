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

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fusion_eval/model.hpp"

namespace fusion_eval {

// Header recognition, tried in order; the first rule that matches wins.
//   exact            the Output Template line itself ("Coherence", "Evaluation Summary:")
//   case-insensitive same text, any case, surrounding whitespace ignored
//   markup-stripped  after dropping * # _ ` list markers ("1.", "-"), a "(1-5)"
//                    suffix and a trailing colon
//   inline header    markup-stripped line "Name: Score ..." carrying the score
// Score slots accept integers and decimals, optionally followed by "/5".
struct ParseDiagnostics {
  std::vector<std::string> matched_sections;  // in order of appearance
  std::vector<std::pair<std::string, std::string>> recovered_with_tolerance;  // (section, rule)
  std::string residual_text;  // text outside any recognised section
  std::vector<std::string> warnings;
};

struct ParsedVerdict {
  FusionVerdict verdict;
  ParseDiagnostics diagnostics;
};

// Throws kMissingSection, kNoScoreFound, kNoExplanationFound,
// kScoreOutOfRange or kMultipleScores; the message names the section.
ParsedVerdict parse_verdict(std::string_view response);

// Range check (kScoreOutOfRange) plus consistency warnings: the overall score
// straying more than 0.5 from the criterion mean is reported, not rejected.
std::vector<std::string> validate_verdict(const FusionVerdict& verdict);

inline constexpr double kOverallDriftTolerance = 0.5;

}  // namespace fusion_eval
