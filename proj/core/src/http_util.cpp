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

#include "http_util.hpp"

#include "fusion_eval/error.hpp"

namespace fusion_eval::detail {

SplitUrl split_url(std::string_view url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) {
    throw Error(ErrorCode::kConfigError, "endpoint must include a scheme: " + std::string(url));
  }
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  if (path_start == std::string_view::npos) {
    out.origin = std::string(url);
  } else {
    out.origin = std::string(url.substr(0, path_start));
    out.path_prefix = std::string(url.substr(path_start));
  }
  while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
  if (out.origin.size() <= scheme_end + 3) {
    throw Error(ErrorCode::kConfigError, "endpoint has no host: " + std::string(url));
  }
  return out;
}

}  // namespace fusion_eval::detail
