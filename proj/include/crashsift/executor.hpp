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

// Building and fuzzing a driver for a bounded time. The simulated executor
// maps driver text to scripted outcomes; the external one shells out to the
// project's own build and fuzz commands.

#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crashsift/crash.hpp"

namespace crashsift {

inline constexpr const char* kDriverEntrySymbol = "LLVMFuzzerTestOneInput";
inline constexpr double kDefaultFuzzDurationS = 300.0;

struct FuzzDriver {
  std::string source;
  int revision = 0;  // 1 for the prototype, +1 per enhancement
  bool build_ok = false;

  bool operator==(const FuzzDriver&) const = default;
};

struct ExecutionResult {
  bool built = false;
  bool crashed = false;
  std::optional<CrashReport> crash;  // present iff crashed
  double coverage = 0.0;             // project line coverage, [0, 1]
  double duration_s = 0.0;

  bool operator==(const ExecutionResult&) const = default;
};

struct SimRule {
  enum class Match { Contains, Regex, Default };
  Match match = Match::Default;
  std::string pattern;
  // Outcome; `crash` holds the parsed sanitizer report for crashing rules.
  bool built = true;
  bool crashed = false;
  std::optional<CrashReport> crash;
  double coverage = 0.0;
};

// simproject.yaml:
//   rules:
//     - match: {contains: "ConsumeBytes"}
//       outcome: {crashed: true, coverage: 0.25, sanitizer_log_file: hbo.log}
//     - match: {regex: "Consume(Integral|Bool)"}
//       outcome: {coverage: 0.4}
//     - match: default
//       outcome: {coverage: 0.2}
// `sanitizer_log` may hold the report inline; `built: false` scripts a
// build failure. Rules are tried in order; a default rule is required.
struct SimulatedProject {
  std::vector<SimRule> rules;

  // Relative sanitizer_log_file paths resolve against base_dir. Throws
  // InvalidConfig, IOFailure for an unreadable log file, or ParseError for
  // YAML syntax.
  static SimulatedProject from_yaml(std::string_view yaml_text,
                                    const std::filesystem::path& base_dir);
  static SimulatedProject load(const std::filesystem::path& path);
};

struct ExternalBuild {
  // Both run via `sh -c` in the work directory with DRIVER_SOURCE, WORKDIR
  // and FUZZ_DURATION_S in the environment.
  std::string build_cmd;
  std::string fuzz_cmd;
  // Relative to the work directory; holds a single fraction ("0.42") or
  // percentage ("42%"). A missing file means zero coverage.
  std::string coverage_file;
  std::chrono::seconds build_timeout{600};
  std::chrono::seconds grace{30};
};

// Deterministic: first matching rule wins. Throws BuildFailure for an empty
// driver or a rule scripting a failed build.
ExecutionResult execute_driver(const FuzzDriver& driver, const SimulatedProject& project,
                               double duration_s = kDefaultFuzzDurationS);

// Writes the driver to <workdir>/fuzz_driver.cc, builds, fuzzes. Throws
// BuildFailure (build command non-zero) and ExecutorTimeout (fuzz command
// ran past duration + grace).
ExecutionResult execute_driver(const FuzzDriver& driver, const ExternalBuild& build,
                               const std::filesystem::path& workdir,
                               double duration_s = kDefaultFuzzDurationS);

// Reads a coverage summary: one number, optionally suffixed with '%'.
// Throws ParseError.
double parse_coverage_summary(std::string_view text);

}  // namespace crashsift
