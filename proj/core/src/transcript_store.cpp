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

#include <nlohmann/json.hpp>

#include <system_error>

#include "fusion_eval/error.hpp"
#include "fusion_eval/llm_client.hpp"
#include "io_util.hpp"

namespace fusion_eval {

using nlohmann::json;

std::string serialize_transcript(const Transcript& t) {
  json j = {{"request_digest", t.request_digest},
            {"model_id", t.model_id},
            {"temperature", t.temperature},
            {"max_output_tokens", t.max_output_tokens},
            {"prompt", t.prompt},
            {"response", t.response},
            {"timestamp", t.timestamp},
            {"backend", std::string(to_string(t.backend))}};
  return j.dump(2) + "\n";
}

Transcript parse_transcript(std::string_view text) {
  try {
    const auto j = json::parse(text);
    Transcript t;
    t.request_digest = j.at("request_digest").get<std::string>();
    t.model_id = j.at("model_id").get<std::string>();
    t.temperature = j.at("temperature").get<double>();
    t.max_output_tokens = j.at("max_output_tokens").get<int>();
    t.prompt = j.value("prompt", "");
    t.response = j.at("response").get<std::string>();
    t.timestamp = j.value("timestamp", "");
    const auto backend = backend_kind_from_string(j.value("backend", "live"));
    if (!backend) throw Error(ErrorCode::kMalformedRecord, "unknown transcript backend");
    t.backend = *backend;
    return t;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedRecord, std::string("transcript: ") + e.what());
  }
}

TranscriptStore::TranscriptStore(std::filesystem::path dir, bool read_only)
    : dir_(std::move(dir)), read_only_(read_only) {
  std::error_code ec;
  if (read_only_) {
    if (!std::filesystem::is_directory(dir_, ec)) {
      throw Error(ErrorCode::kConfigError, "transcript directory not found: " + dir_.string());
    }
  } else {
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir_.string());
  }
}

std::optional<Transcript> TranscriptStore::find(const std::string& digest) const {
  const auto path = dir_ / (digest + ".json");
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) return std::nullopt;
  auto t = parse_transcript(detail::read_file(path));
  if (t.request_digest != digest) {
    throw Error(ErrorCode::kMalformedRecord, path.string() + ": digest does not match file name");
  }
  return t;
}

void TranscriptStore::put(const Transcript& t) const {
  if (read_only_) throw Error(ErrorCode::kIoError, "transcript store is read-only");
  detail::write_file_atomic(dir_ / (t.request_digest + ".json"), serialize_transcript(t));
}

}  // namespace fusion_eval
