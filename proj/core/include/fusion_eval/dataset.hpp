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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fusion_eval/model.hpp"

namespace fusion_eval {

enum class DatasetFormat { kSummEvalJsonl };

// Which annotation list of a SummEval record feeds HumanAnnotation. Only
// expert annotations are read; crowd annotations are ignored.
enum class AnnotationSource { kExpert };

struct Dataset {
  std::vector<EvaluationExample> examples;           // file order
  std::map<std::string, std::vector<std::string>> doc_index;  // doc_id -> system_ids, file order

  std::size_t size() const { return examples.size(); }
  const EvaluationExample* find(const ExampleKey& key) const;
};

// Loads one record per line:
//   {"id": doc, "model_id": system, "text": article, "decoded": summary,
//    "expert_annotations": [{"coherence": 1..5, "consistency": ..,
//                            "fluency": .., "relevance": ..}, ...]}
// Other keys are ignored. Blank lines are skipped. Errors name the 1-based
// line number.
Dataset load_dataset(const std::filesystem::path& path,
                     DatasetFormat format = DatasetFormat::kSummEvalJsonl,
                     AnnotationSource source = AnnotationSource::kExpert);

// Same as load_dataset, from an in-memory buffer.
Dataset parse_dataset(std::string_view contents,
                      DatasetFormat format = DatasetFormat::kSummEvalJsonl,
                      AnnotationSource source = AnnotationSource::kExpert);

// Per-criterion unweighted mean; the raw ratings are kept on the result.
HumanAnnotation aggregate_expert_scores(std::span<const ExpertRating> raw);

}  // namespace fusion_eval
