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
#include <string>
#include <string_view>

namespace fusion_eval::detail {

// Whole-file read; throws Error(kFileUnreadable).
std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file and renames it into place, so readers never
// observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);

// Shortest decimal text that parses back to exactly the same double.
std::string format_shortest(double value);

}  // namespace fusion_eval::detail
