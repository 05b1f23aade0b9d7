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

#include <stdexcept>
#include <string>
#include <string_view>

namespace fusion_eval {

enum class ErrorCode {
  kInvalidArgument,
  kConfigError,
  kFileUnreadable,
  kIoError,
  // dataset ingest
  kMalformedRecord,
  kDuplicateExample,
  kEmptyAnnotationSet,
  kOutOfRangeAnnotation,
  // assistant scorers
  kBackendUnavailable,
  kMissingScore,
  kNonFiniteScore,
  kMalformedRow,
  kDuplicateKey,
  // prompts
  kEmptySection,
  kUnknownPlaceholder,
  kUnfilledPlaceholder,
  // llm client
  kBackendError,
  kReplayMiss,
  kTimeout,
  // response parser
  kMissingSection,
  kNoScoreFound,
  kNoExplanationFound,
  kScoreOutOfRange,
  kMultipleScores,
  // meta evaluation
  kDegenerateVector,
  kEmptyMatrix,
  kKeyMismatch,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library. The code is stable and is what run
// records and tests key on; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // The message without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace fusion_eval
