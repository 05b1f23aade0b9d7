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

#include "fusion_eval/llm_client.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <ctime>
#include <thread>

#include "fusion_eval/error.hpp"
#include "fusion_eval/hashing.hpp"
#include "http_util.hpp"

namespace fusion_eval {
namespace {

using nlohmann::json;

bool retryable(int status) {
  return status == 408 || status == 409 || status == 429 || status >= 500;
}

class HttplibTransport final : public HttpTransport {
 public:
  HttplibTransport(const std::string& base_url, std::chrono::milliseconds timeout)
      : url_(detail::split_url(base_url)), timeout_(timeout) {}

  std::variant<HttpReply, TransportFailure> post(
      const std::string& path, const std::string& body,
      const std::vector<std::pair<std::string, std::string>>& headers) override {
    // One client per call: httplib::Client is not safe to share across threads.
    httplib::Client client(url_.origin);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    client.set_connection_timeout(seconds);
    client.set_read_timeout(seconds);
    client.set_write_timeout(seconds);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = client.Post(url_.path_prefix + path, h, body, "application/json");
    if (!res) {
      const auto err = res.error();
      return TransportFailure{
          err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read,
          httplib::to_string(err)};
    }
    return HttpReply{res->status, res->body};
  }

 private:
  detail::SplitUrl url_;
  std::chrono::milliseconds timeout_;
};

}  // namespace

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::kLive: return "live";
    case BackendKind::kMock: return "mock";
    case BackendKind::kReplay: return "replay";
  }
  return "";
}

std::optional<BackendKind> backend_kind_from_string(std::string_view name) {
  if (name == "live") return BackendKind::kLive;
  if (name == "mock") return BackendKind::kMock;
  if (name == "replay") return BackendKind::kReplay;
  return std::nullopt;
}

void LlmRequest::validate() const {
  if (prompt.empty()) throw Error(ErrorCode::kInvalidArgument, "empty prompt");
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw Error(ErrorCode::kInvalidArgument, "temperature must be >= 0");
  }
  if (max_output_tokens <= 0) throw Error(ErrorCode::kInvalidArgument, "max_output_tokens <= 0");
  if (sample_count < 1) throw Error(ErrorCode::kInvalidArgument, "sample_count < 1");
}

std::string request_digest(const LlmRequest& req) {
  const json key = {{"max_output_tokens", req.max_output_tokens},
                    {"model_id", req.model_id},
                    {"prompt", req.prompt},
                    {"temperature", req.temperature}};
  return sha256_hex(key.dump());
}

std::string utc_timestamp_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------

ReplayBackend::ReplayBackend(std::filesystem::path dir) : store_(std::move(dir), true) {}

std::string ReplayBackend::complete(const LlmRequest& req) {
  req.validate();
  const auto digest = request_digest(req);
  auto t = store_.find(digest);
  if (!t) throw Error(ErrorCode::kReplayMiss, "no transcript for digest " + digest);
  return t->response;
}

// ---------------------------------------------------------------------------

std::shared_ptr<HttpTransport> make_http_transport(const std::string& base_url,
                                                   std::chrono::milliseconds timeout) {
  return std::make_shared<HttplibTransport>(base_url, timeout);
}

std::chrono::milliseconds RetryPolicy::backoff_before(int attempt) const {
  if (attempt <= 1) return std::chrono::milliseconds(0);
  const double factor = std::pow(multiplier, attempt - 2);
  const double ms = static_cast<double>(initial_backoff.count()) * factor;
  return std::chrono::milliseconds(
      static_cast<long long>(std::min(ms, static_cast<double>(max_backoff.count()))));
}

LiveBackend::LiveBackend(std::shared_ptr<HttpTransport> transport, LiveBackendOptions options)
    : transport_(std::move(transport)),
      options_(std::move(options)),
      slots_(std::max(1, options_.max_parallel)) {
  if (!transport_) throw Error(ErrorCode::kConfigError, "live backend needs a transport");
  if (options_.retry.max_attempts < 1) options_.retry.max_attempts = 1;
  if (!options_.sleep) {
    options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

std::string LiveBackend::complete(const LlmRequest& req) {
  req.validate();
  const json body = {{"model", req.model_id},
                     {"messages", json::array({{{"role", "user"}, {"content", req.prompt}}})},
                     {"temperature", req.temperature},
                     {"max_tokens", req.max_output_tokens},
                     {"n", req.sample_count}};
  const auto payload = body.dump();
  std::vector<std::pair<std::string, std::string>> headers;
  if (!options_.api_key.empty()) headers.emplace_back("Authorization", "Bearer " + options_.api_key);

  std::optional<HttpReply> last_reply;
  std::optional<TransportFailure> last_failure;
  for (int attempt = 1; attempt <= options_.retry.max_attempts; ++attempt) {
    if (attempt > 1) options_.sleep(options_.retry.backoff_before(attempt));

    std::variant<HttpReply, TransportFailure> outcome;
    {
      slots_.acquire();
      struct Release {
        std::counting_semaphore<>& s;
        ~Release() { s.release(); }
      } release{slots_};
      outcome = transport_->post(options_.completions_path, payload, headers);
    }

    if (auto* failure = std::get_if<TransportFailure>(&outcome)) {
      last_failure = *failure;
      last_reply.reset();
      continue;
    }
    auto& reply = std::get<HttpReply>(outcome);
    if (reply.status == 200) {
      try {
        const auto j = json::parse(reply.body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kBackendError,
                    "status 200 with unexpected body: " + reply.body.substr(0, 512));
      }
    }
    last_failure.reset();
    last_reply = std::move(reply);
    if (!retryable(last_reply->status)) break;
  }

  if (last_failure) {
    throw Error(last_failure->timeout ? ErrorCode::kTimeout : ErrorCode::kBackendError,
                last_failure->message);
  }
  throw Error(ErrorCode::kBackendError, "status " + std::to_string(last_reply->status) + ": " +
                                            last_reply->body.substr(0, 512));
}

// ---------------------------------------------------------------------------

CachingBackend::CachingBackend(std::unique_ptr<LlmBackend> inner, std::filesystem::path cache_dir,
                               Clock clock)
    : inner_(std::move(inner)), store_(std::move(cache_dir)), clock_(std::move(clock)) {
  if (!inner_) throw Error(ErrorCode::kConfigError, "caching backend needs an inner backend");
  if (!clock_) clock_ = utc_timestamp_now;
}

std::string CachingBackend::complete(const LlmRequest& req) {
  req.validate();
  const auto digest = request_digest(req);
  if (auto t = store_.find(digest)) {
    ++hits_;
    return t->response;
  }

  std::promise<std::string> promise;
  std::shared_future<std::string> shared;
  {
    std::lock_guard lock(mu_);
    if (auto it = in_flight_.find(digest); it != in_flight_.end()) {
      shared = it->second;
    } else if (auto t = store_.find(digest)) {
      // Finished by another caller between the first lookup and the lock.
      ++hits_;
      return t->response;
    } else {
      in_flight_.emplace(digest, promise.get_future().share());
    }
  }
  if (shared.valid()) {
    ++hits_;
    return shared.get();
  }

  ++misses_;
  try {
    auto response = inner_->complete(req);
    store_.put(Transcript{digest, req.model_id, req.temperature, req.max_output_tokens, req.prompt,
                          response, clock_(), inner_->kind()});
    promise.set_value(response);
    std::lock_guard lock(mu_);
    in_flight_.erase(digest);
    return response;
  } catch (...) {
    promise.set_exception(std::current_exception());
    std::lock_guard lock(mu_);
    in_flight_.erase(digest);
    throw;
  }
}

}  // namespace fusion_eval
