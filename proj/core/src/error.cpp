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

#include "fusion_eval/error.hpp"

namespace fusion_eval {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kFileUnreadable: return "FileUnreadable";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kMalformedRecord: return "MalformedRecord";
    case ErrorCode::kDuplicateExample: return "DuplicateExample";
    case ErrorCode::kEmptyAnnotationSet: return "EmptyAnnotationSet";
    case ErrorCode::kOutOfRangeAnnotation: return "OutOfRangeAnnotation";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kMissingScore: return "MissingScore";
    case ErrorCode::kNonFiniteScore: return "NonFiniteScore";
    case ErrorCode::kMalformedRow: return "MalformedRow";
    case ErrorCode::kDuplicateKey: return "DuplicateKey";
    case ErrorCode::kEmptySection: return "EmptySection";
    case ErrorCode::kUnknownPlaceholder: return "UnknownPlaceholder";
    case ErrorCode::kUnfilledPlaceholder: return "UnfilledPlaceholder";
    case ErrorCode::kBackendError: return "BackendError";
    case ErrorCode::kReplayMiss: return "ReplayMiss";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kMissingSection: return "MissingSection";
    case ErrorCode::kNoScoreFound: return "NoScoreFound";
    case ErrorCode::kNoExplanationFound: return "NoExplanationFound";
    case ErrorCode::kScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorCode::kMultipleScores: return "MultipleScores";
    case ErrorCode::kDegenerateVector: return "DegenerateVector";
    case ErrorCode::kEmptyMatrix: return "EmptyMatrix";
    case ErrorCode::kKeyMismatch: return "KeyMismatch";
  }
  return "Unknown";
}

}  // namespace fusion_eval
