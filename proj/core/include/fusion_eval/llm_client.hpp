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

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "fusion_eval/model.hpp"

namespace fusion_eval {

enum class BackendKind { kLive, kMock, kReplay };

std::string_view to_string(BackendKind kind);
std::optional<BackendKind> backend_kind_from_string(std::string_view name);

struct LlmRequest {
  std::string model_id = "gpt-4";
  std::string prompt;
  double temperature = 0.0;
  int max_output_tokens = 1024;
  int sample_count = 1;

  // Throws kInvalidArgument on an empty prompt, negative temperature or
  // non-positive counts.
  void validate() const;
};

// SHA-256 over a canonical encoding of (model_id, temperature,
// max_output_tokens, prompt). sample_count is not part of the key.
std::string request_digest(const LlmRequest& req);

struct Transcript {
  std::string request_digest;
  std::string model_id;
  double temperature = 0.0;
  int max_output_tokens = 0;
  std::string prompt;
  std::string response;
  std::string timestamp;  // ISO-8601 UTC
  BackendKind backend = BackendKind::kLive;
};

std::string serialize_transcript(const Transcript& t);
Transcript parse_transcript(std::string_view text);

// Content-addressed directory of transcripts, one `<digest>.json` per request.
// Writes go through a temp file and a rename, so concurrent writers of the
// same digest never leave a torn entry.
class TranscriptStore {
 public:
  explicit TranscriptStore(std::filesystem::path dir, bool read_only = false);

  std::optional<Transcript> find(const std::string& digest) const;
  void put(const Transcript& t) const;
  const std::filesystem::path& dir() const { return dir_; }
  bool read_only() const { return read_only_; }

 private:
  std::filesystem::path dir_;
  bool read_only_;
};

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  // Callable concurrently.
  virtual std::string complete(const LlmRequest& req) = 0;
  virtual BackendKind kind() const = 0;
};

inline std::string complete(LlmBackend& backend, const LlmRequest& req) {
  return backend.complete(req);
}

// ---------------------------------------------------------------------------
// Mock: answers every prompt with a verdict rendered in the Output Template.

using VerdictOracle = std::function<FusionVerdict(const LlmRequest&)>;

// The Output Template, filled in. Values are printed in shortest round-trip
// form so parsing recovers them exactly.
std::string emit_canonical(const FusionVerdict& verdict);

// Reads the three assistant scores from the Input Example block of a rendered
// evaluation prompt (the last occurrence of each score label).
std::optional<AssistantScoreSet> extract_prompt_scores(std::string_view prompt);

// Score-sensitive oracle: each criterion is 1 + 4 * (relevant assistant score)
// rounded to half points; overall is their mean. Prompts without scores get a
// verdict derived from a hash of the prompt.
FusionVerdict default_mock_oracle(const LlmRequest& req);

std::string mock_complete(const LlmRequest& req, const VerdictOracle& oracle);

class MockBackend final : public LlmBackend {
 public:
  explicit MockBackend(VerdictOracle oracle = default_mock_oracle);
  std::string complete(const LlmRequest& req) override;
  BackendKind kind() const override { return BackendKind::kMock; }

 private:
  VerdictOracle oracle_;
};

// ---------------------------------------------------------------------------
// Replay: the transcript store, read-only.

class ReplayBackend final : public LlmBackend {
 public:
  explicit ReplayBackend(std::filesystem::path dir);
  std::string complete(const LlmRequest& req) override;  // throws kReplayMiss
  BackendKind kind() const override { return BackendKind::kReplay; }

 private:
  TranscriptStore store_;
};

// ---------------------------------------------------------------------------
// Live: chat-completion HTTP endpoint.

struct HttpReply {
  int status = 0;
  std::string body;
};

struct TransportFailure {
  bool timeout = false;
  std::string message;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual std::variant<HttpReply, TransportFailure> post(
      const std::string& path, const std::string& body,
      const std::vector<std::pair<std::string, std::string>>& headers) = 0;
};

// cpp-httplib client; http:// and https:// base URLs.
std::shared_ptr<HttpTransport> make_http_transport(const std::string& base_url,
                                                   std::chrono::milliseconds timeout);

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{30000};

  // Delay before attempt `attempt` (1-based; attempt 1 has none).
  std::chrono::milliseconds backoff_before(int attempt) const;
};

struct LiveBackendOptions {
  std::string api_key;  // sent as a bearer token when non-empty
  std::string completions_path = "/v1/chat/completions";
  RetryPolicy retry;
  int max_parallel = 4;
  std::function<void(std::chrono::milliseconds)> sleep;  // default: this_thread::sleep_for
};

// Retries connection failures, timeouts, 408, 409, 429 and 5xx with
// exponential backoff. Other statuses fail immediately.
class LiveBackend final : public LlmBackend {
 public:
  LiveBackend(std::shared_ptr<HttpTransport> transport, LiveBackendOptions options);
  std::string complete(const LlmRequest& req) override;
  BackendKind kind() const override { return BackendKind::kLive; }

 private:
  std::shared_ptr<HttpTransport> transport_;
  LiveBackendOptions options_;
  std::counting_semaphore<> slots_;
};

// ---------------------------------------------------------------------------
// Cache in front of any backend. Concurrent requests with the same digest
// share one upstream call.

class CachingBackend final : public LlmBackend {
 public:
  using Clock = std::function<std::string()>;

  CachingBackend(std::unique_ptr<LlmBackend> inner, std::filesystem::path cache_dir,
                 Clock clock = {});
  std::string complete(const LlmRequest& req) override;
  BackendKind kind() const override { return inner_->kind(); }

  std::size_t hits() const { return hits_.load(); }
  std::size_t misses() const { return misses_.load(); }

 private:
  std::unique_ptr<LlmBackend> inner_;
  TranscriptStore store_;
  Clock clock_;
  std::mutex mu_;
  std::map<std::string, std::shared_future<std::string>> in_flight_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

std::string utc_timestamp_now();

}  // namespace fusion_eval
