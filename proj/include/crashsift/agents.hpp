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

// Registry of the six agents and their shipped prompt templates, plus the
// output parsers of the four driver-generation agents.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crashsift/agent.hpp"
#include "crashsift/crash.hpp"

namespace crashsift {

inline constexpr const char* kFunctionAnalyzer = "function-analyzer";
inline constexpr const char* kCrashValidator = "crash-validator";
inline constexpr const char* kPrototyper = "prototyper";
inline constexpr const char* kEnhancer = "enhancer";
inline constexpr const char* kCoverageAnalyzer = "coverage-analyzer";
inline constexpr const char* kCrashAnalyzer = "crash-analyzer";
inline constexpr std::string_view kSimpleSuffix = "-simple";

// Agents whose prompts carry the function constraints.
bool receives_constraints(std::string_view agent);
bool is_writer(std::string_view agent);

// Raw template text by prompt file stem, e.g. "crash-validator-simple".
// Throws NotFound.
std::string_view prompt_template(std::string_view name);
std::vector<std::string> prompt_template_names();

// Spec by agent name; "<agent>-simple" selects the task-only prompt of the
// function analyzer or crash validator. Throws NotFound.
AgentSpec agent_spec(std::string_view name);
std::vector<std::string> agent_names();

// The driver inside <fuzz_driver>, markdown fences stripped. Throws
// MalformedOutput when the section or LLVMFuzzerTestOneInput is missing.
std::string parse_fuzz_driver_output(std::string_view text);

struct CrashAnalysis {
  CrashClassification classification;
  std::string root_cause;
};
// <classification>ProgramError|FuzzDriverError</classification>
// <root_cause>...</root_cause>. Throws MalformedOutput.
CrashAnalysis parse_crash_analysis_output(std::string_view text);

// Non-empty <suggestions>. Throws MalformedOutput.
std::string parse_coverage_analysis_output(std::string_view text);

}  // namespace crashsift
