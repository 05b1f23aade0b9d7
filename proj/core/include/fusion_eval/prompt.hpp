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

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fusion_eval/model.hpp"

namespace fusion_eval {

// Template syntax, applied left to right:
//   "{{"                          -> literal "{"
//   "{" name "}"                  -> placeholder, name = [A-Za-z_][A-Za-z0-9_]*
//   any other "{", and every "}"  -> literal
// So "{{a}" is the literal text "{a}", and "{ not a name}" is left as is.
struct TemplateSegment {
  enum class Kind { kLiteral, kPlaceholder };
  Kind kind;
  std::string text;  // unescaped literal text, or the placeholder name

  bool operator==(const TemplateSegment&) const = default;
};

std::vector<TemplateSegment> tokenize_template(std::string_view body);

// Doubles every '{' so the text survives tokenize_template as a literal.
std::string escape_braces(std::string_view text);

inline constexpr std::array<std::string_view, 5> kCanonicalPlaceholders = {
    "source", "answer", "nli_score_source_answer", "Bleurt_score_source_answer",
    "SumBleurt_score_source_answer"};

struct PromptTemplate {
  std::string body;
  std::vector<std::string> placeholders;  // distinct, in order of first appearance

  static PromptTemplate from_text(std::string body);
};

// Verbatim load; throws kFileUnreadable.
PromptTemplate load_template(const std::filesystem::path& path);

// The SummEval reference-free evaluation template shipped with the library.
const PromptTemplate& canonical_template();

// Scores are printed with exactly three decimals.
std::string format_prompt_score(double score);

// Fills every placeholder. Throws kUnknownPlaceholder for names outside the
// canonical five and kUnfilledPlaceholder if a placeholder span survives.
std::string render_evaluation_prompt(const PromptTemplate& tmpl, const EvaluationExample& ex,
                                     const AssistantScoreSet& scores);

struct EvaluatorDescription {
  std::string name;
  std::string description;
};

// Inputs for the prompt that asks an LLM to plan an evaluation.
struct PlanningSpec {
  std::string task_definition;
  std::optional<std::string> criteria;  // absent: the LLM is asked to define its own
  std::vector<EvaluatorDescription> evaluators;
  std::string output_request;

  // Task definition, SummEval criteria and the NLI/BLEURT/SumBLEURT
  // descriptions used for the shipped template.
  static PlanningSpec summeval_default();
};

// Instruction emitted in place of the criteria section when none are given.
extern const std::string_view kGenerateCriteriaInstruction;

// Sections in order: task definition, criteria, assistant evaluators, output
// request. Throws kEmptySection for blank required text.
std::string build_planning_prompt(const PlanningSpec& spec);

}  // namespace fusion_eval
