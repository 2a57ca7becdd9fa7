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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace crashsift {

struct StackFrame {
  std::string function;  // "<unknown>" when unsymbolized
  std::string file;
  int line = 0;
  std::string sanitizer_tag;  // e.g. "AddressSanitizer"

  bool operator==(const StackFrame&) const = default;
};

enum class CrashClassification { ProgramError, FuzzDriverError };

std::string_view to_string(CrashClassification c);
// Accepts "ProgramError", "program error", "Fuzz Driver Error", "driver_error", ...
std::optional<CrashClassification> parse_classification(std::string_view text);

struct CrashReport {
  std::vector<StackFrame> stacktrace;
  std::string crash_type;
  std::string logs;
  std::string root_cause;
  std::optional<CrashClassification> classification;

  bool operator==(const CrashReport&) const = default;
  std::string stacktrace_text() const;
};

// Reads the first sanitizer ERROR block: crash type from the ERROR line and
// frames from the first `#N 0x... in func file:line` stack after it. Never
// aborts on arbitrary input; throws NoCrashFound when there is no ERROR line
// or no frame.
CrashReport parse_sanitizer_report(std::string_view text);

nlohmann::ordered_json to_json(const CrashReport& crash);
// Throws ParseError on schema violations or an empty stacktrace.
CrashReport crash_from_json(const nlohmann::ordered_json& j);

}  // namespace crashsift
