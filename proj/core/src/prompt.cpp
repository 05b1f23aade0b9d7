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

#include "fusion_eval/prompt.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>

#include "fusion_eval/error.hpp"
#include "io_util.hpp"

namespace fusion_eval {
namespace {

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_';
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

// Length of "name}" starting at body[pos] (just past '{'), or 0.
std::size_t placeholder_length(std::string_view body, std::size_t pos) {
  if (pos >= body.size() || !is_name_start(body[pos])) return 0;
  std::size_t end = pos + 1;
  while (end < body.size() && is_name_char(body[end])) ++end;
  if (end >= body.size() || body[end] != '}') return 0;
  return end - pos;
}

bool is_canonical(std::string_view name) {
  return std::find(kCanonicalPlaceholders.begin(), kCanonicalPlaceholders.end(), name) !=
         kCanonicalPlaceholders.end();
}

std::string_view count_word(std::size_t n) {
  static constexpr std::string_view kWords[] = {"Zero", "One", "Two",   "Three", "Four", "Five",
                                                "Six",  "Seven", "Eight", "Nine",  "Ten"};
  return n < std::size(kWords) ? kWords[n] : std::string_view{};
}

void require_text(std::string_view text, std::string_view section) {
  if (detail::trim(text).empty()) {
    throw Error(ErrorCode::kEmptySection, std::string(section) + " is empty");
  }
}

constexpr const char* kCanonicalTemplateText =
#include "canonical_template.inc"
    ;

}  // namespace

std::vector<TemplateSegment> tokenize_template(std::string_view body) {
  std::vector<TemplateSegment> segments;
  std::string literal;
  auto flush = [&] {
    if (!literal.empty()) {
      segments.push_back({TemplateSegment::Kind::kLiteral, std::move(literal)});
      literal.clear();
    }
  };
  for (std::size_t i = 0; i < body.size();) {
    if (body[i] != '{') {
      literal.push_back(body[i++]);
      continue;
    }
    if (i + 1 < body.size() && body[i + 1] == '{') {
      literal.push_back('{');
      i += 2;
      continue;
    }
    if (const auto len = placeholder_length(body, i + 1); len > 0) {
      flush();
      segments.push_back({TemplateSegment::Kind::kPlaceholder, std::string(body.substr(i + 1, len))});
      i += len + 2;
      continue;
    }
    literal.push_back('{');
    ++i;
  }
  flush();
  return segments;
}

std::string escape_braces(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    out.push_back(c);
    if (c == '{') out.push_back('{');
  }
  return out;
}

PromptTemplate PromptTemplate::from_text(std::string body) {
  PromptTemplate tmpl;
  for (auto& seg : tokenize_template(body)) {
    if (seg.kind == TemplateSegment::Kind::kPlaceholder &&
        std::find(tmpl.placeholders.begin(), tmpl.placeholders.end(), seg.text) ==
            tmpl.placeholders.end()) {
      tmpl.placeholders.push_back(std::move(seg.text));
    }
  }
  tmpl.body = std::move(body);
  return tmpl;
}

PromptTemplate load_template(const std::filesystem::path& path) {
  return PromptTemplate::from_text(detail::read_file(path));
}

const PromptTemplate& canonical_template() {
  static const PromptTemplate tmpl = PromptTemplate::from_text(kCanonicalTemplateText);
  return tmpl;
}

std::string format_prompt_score(double score) { return fmt::format("{:.3f}", score); }

std::string render_evaluation_prompt(const PromptTemplate& tmpl, const EvaluationExample& ex,
                                     const AssistantScoreSet& scores) {
  for (const auto& name : tmpl.placeholders) {
    if (!is_canonical(name)) throw Error(ErrorCode::kUnknownPlaceholder, "{" + name + "}");
  }
  auto value_of = [&](std::string_view name) -> std::string {
    if (name == "source") return ex.source;
    if (name == "answer") return ex.answer;
    if (name == "nli_score_source_answer") return format_prompt_score(scores.nli);
    if (name == "Bleurt_score_source_answer") return format_prompt_score(scores.bleurt);
    return format_prompt_score(scores.sum_bleurt);
  };

  // Build the fully escaped text, confirm nothing placeholder-shaped is left
  // in it, then unescape. Article text containing "{x}" stays literal.
  std::string escaped;
  escaped.reserve(tmpl.body.size() + ex.source.size() + ex.answer.size());
  for (const auto& seg : tokenize_template(tmpl.body)) {
    escaped += escape_braces(seg.kind == TemplateSegment::Kind::kLiteral ? std::string_view(seg.text)
                                                                         : value_of(seg.text));
  }
  std::string out;
  out.reserve(escaped.size());
  for (const auto& seg : tokenize_template(escaped)) {
    if (seg.kind == TemplateSegment::Kind::kPlaceholder) {
      throw Error(ErrorCode::kUnfilledPlaceholder, "{" + seg.text + "}");
    }
    out += seg.text;
  }
  return out;
}

const std::string_view kGenerateCriteriaInstruction =
    "No evaluation criteria are given. Please define the criteria you will use to evaluate the "
    "answer, with a 1-5 scale for each, before planning how to assess them.";

PlanningSpec PlanningSpec::summeval_default() {
  PlanningSpec spec;
  spec.task_definition =
      "You are an evaluation agent. I will give you an instruction, source, and answer. Please "
      "evaluate the quality of the answer in relation to the given instruction and source. Source "
      "maybe empty, please grade the answer based on instruction.";
  spec.criteria =
      "Coherence (1-5): the collective quality of all sentences. The summary should be "
      "well-structured and well-organized, building from sentence to sentence into a coherent "
      "body of information about the topic.\n"
      "Consistency (1-5): the factual alignment between the summary and the source. A consistent "
      "summary contains only statements that are entailed by the source.\n"
      "Fluency (1-5): the quality of the individual sentences: grammar, spelling, punctuation, "
      "word choice and sentence structure.\n"
      "Relevance (1-5): selection of important content from the source. The summary should "
      "include only important information and avoid redundancy.";
  spec.evaluators = {
      {"Natural Language Inference (NLI)",
       "provides probability of the entailed relationship between source text (as premise). Its "
       "range is between 0-1, close to 1 indicates that the hypotheses is entailed by the "
       "premise."},
      {"Bleurt",
       "is an evaluation metric for Natural Language Generation. It takes a pair of sentences as "
       "input, a reference and a candidate, and it returns a score that indicates to what extent "
       "the candidate is fluent and conveys the meaning of the reference."},
      {"SumBleurt",
       "is an evaluation metrics which finetune on summarization dataset. It treats the artical "
       "as the reference and the summary as a candidate and it returns a scores that indicates to "
       "what extend the summary is fluent, coherence and conveys the meaning of the article."},
  };
  spec.output_request =
      "Please provide me your understanding on the evaluation task and your plan on tool usage, "
      "criteria planning and steps";
  return spec;
}

std::string build_planning_prompt(const PlanningSpec& spec) {
  require_text(spec.task_definition, "task definition");
  require_text(spec.output_request, "output request");
  if (spec.criteria) require_text(*spec.criteria, "criteria");
  for (const auto& ev : spec.evaluators) {
    require_text(ev.name, "evaluator name");
    require_text(ev.description, "description of evaluator '" + ev.name + "'");
  }

  std::string out = std::string(detail::trim(spec.task_definition)) + "\n\n";
  if (spec.criteria) {
    out += "Evaluation criteria:\n" + std::string(detail::trim(*spec.criteria)) + "\n\n";
  } else {
    out += std::string(kGenerateCriteriaInstruction) + "\n\n";
  }
  if (!spec.evaluators.empty()) {
    const auto n = spec.evaluators.size();
    std::string count(count_word(n));
    if (count.empty()) count = std::to_string(n);
    out += n == 1 ? count + " Assistant Evaluator's output is provided.\n\n"
                  : count + " Assistant Evaluators' outputs are provided.\n\n";
    for (std::size_t i = 0; i < n; ++i) {
      out += std::to_string(i + 1) + ". " + std::string(detail::trim(spec.evaluators[i].name)) +
             " " + std::string(detail::trim(spec.evaluators[i].description)) + "\n\n";
    }
  }
  out += std::string(detail::trim(spec.output_request)) + "\n";
  return out;
}

}  // namespace fusion_eval
