// Copyright 2026 The crashsift Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
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

namespace crashsift {

std::string sha256_hex(std::string_view data);

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temp file and renames it into place, so readers never
// observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view data);

// UTC, second resolution: 2026-01-31T12:00:00Z
std::string utc_timestamp_now();

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);

// Collapses every run of whitespace to one space and trims the ends.
std::string normalize_whitespace(std::string_view s);

bool is_within(const std::filesystem::path& root, const std::filesystem::path& p);

}  // namespace crashsift
