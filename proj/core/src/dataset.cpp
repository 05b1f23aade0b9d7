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

#include "fusion_eval/dataset.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>

#include "fusion_eval/error.hpp"
#include "io_util.hpp"

namespace fusion_eval {
namespace {

using nlohmann::json;

[[noreturn]] void malformed(std::size_t line, const std::string& reason) {
  throw Error(ErrorCode::kMalformedRecord, "line " + std::to_string(line) + ": " + reason);
}

std::string required_string(const json& record, const char* key, std::size_t line) {
  auto it = record.find(key);
  if (it == record.end()) malformed(line, std::string("missing field '") + key + "'");
  if (!it->is_string()) malformed(line, std::string("field '") + key + "' is not a string");
  auto value = it->get<std::string>();
  if (value.empty()) malformed(line, std::string("field '") + key + "' is empty");
  return value;
}

ExpertRating parse_rating(const json& obj, std::size_t line) {
  if (!obj.is_object()) malformed(line, "annotation is not an object");
  ExpertRating rating;
  auto read = [&](const char* key, int& slot) {
    auto it = obj.find(key);
    if (it == obj.end()) malformed(line, std::string("annotation missing '") + key + "'");
    if (it->is_number_integer()) {
      slot = it->get<int>();
    } else if (it->is_number_float() && it->get<double>() == static_cast<int>(it->get<double>())) {
      slot = static_cast<int>(it->get<double>());
    } else {
      malformed(line, std::string("annotation '") + key + "' is not an integer");
    }
  };
  read("coherence", rating.coherence);
  read("consistency", rating.consistency);
  read("fluency", rating.fluency);
  read("relevance", rating.relevance);
  if (obj.size() != 4) malformed(line, "annotation has unexpected keys");
  return rating;
}

}  // namespace

const EvaluationExample* Dataset::find(const ExampleKey& key) const {
  auto it = std::find_if(examples.begin(), examples.end(), [&](const EvaluationExample& ex) {
    return ex.doc_id == key.doc_id && ex.system_id == key.system_id;
  });
  return it == examples.end() ? nullptr : &*it;
}

HumanAnnotation aggregate_expert_scores(std::span<const ExpertRating> raw) {
  if (raw.empty()) throw Error(ErrorCode::kEmptyAnnotationSet, "no annotations to aggregate");
  HumanAnnotation out;
  for (Criterion c : kReportCriteria) {
    // Integer sum first: exact, and independent of rating order.
    long sum = 0;
    for (const auto& r : raw) {
      const int v = r.get(c);
      if (v < 1 || v > 5) {
        throw Error(ErrorCode::kOutOfRangeAnnotation,
                    std::string(key_name(c)) + " = " + std::to_string(v) + " outside 1..5");
      }
      sum += v;
    }
    const double mean = static_cast<double>(sum) / static_cast<double>(raw.size());
    switch (c) {
      case Criterion::kCoherence: out.coherence = mean; break;
      case Criterion::kConsistency: out.consistency = mean; break;
      case Criterion::kFluency: out.fluency = mean; break;
      case Criterion::kRelevance: out.relevance = mean; break;
    }
  }
  out.raw_annotations.assign(raw.begin(), raw.end());
  return out;
}

Dataset parse_dataset(std::string_view contents, DatasetFormat format, AnnotationSource source) {
  (void)format;  // single format today
  (void)source;
  Dataset dataset;
  std::set<ExampleKey> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    auto end = contents.find('\n', pos);
    if (end == std::string_view::npos) end = contents.size();
    const auto line = detail::trim(contents.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;

    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      malformed(line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) malformed(line_no, "record is not an object");

    EvaluationExample ex;
    ex.doc_id = required_string(record, "id", line_no);
    ex.system_id = required_string(record, "model_id", line_no);
    ex.source = required_string(record, "text", line_no);
    ex.answer = required_string(record, "decoded", line_no);

    if (auto it = record.find("expert_annotations"); it != record.end() && !it->is_null()) {
      if (!it->is_array()) malformed(line_no, "'expert_annotations' is not a list");
      std::vector<ExpertRating> ratings;
      for (const auto& obj : *it) ratings.push_back(parse_rating(obj, line_no));
      // An empty list means "not annotated", same as an absent key.
      if (!ratings.empty()) {
        try {
          ex.human = aggregate_expert_scores(ratings);
        } catch (const Error& e) {
          throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.message());
        }
      }
    }

    if (!seen.insert(ex.key()).second) {
      throw Error(ErrorCode::kDuplicateExample,
                  "line " + std::to_string(line_no) + ": " + to_string(ex.key()));
    }
    dataset.doc_index[ex.doc_id].push_back(ex.system_id);
    dataset.examples.push_back(std::move(ex));
  }
  return dataset;
}

Dataset load_dataset(const std::filesystem::path& path, DatasetFormat format,
                     AnnotationSource source) {
  return parse_dataset(detail::read_file(path), format, source);
}

}  // namespace fusion_eval
