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

// Function Analyzer (call constraints) and Crash Validator (feasibility
// verdicts): their result types, strict output parsers and entry points.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "crashsift/agent.hpp"
#include "crashsift/crash.hpp"

namespace crashsift {

struct BenchmarkFunction {
  std::string id;  // benchmark id, also the shared-repo namespace
  std::string project_name;
  std::string function_signature;
  std::string function_name;  // derived from the signature when empty
  std::string source_code;
  std::string source_file;  // relative to the checkout root
  int source_line = 0;
};

// "int LibRaw::crxDecodePlane(void *p, uint32_t n)" -> "LibRaw::crxDecodePlane"
std::string function_name_from_signature(std::string_view signature);
// Stable 16-hex-digit id for persisted constraint reports.
std::string function_hash(const BenchmarkFunction& fn);

enum class ConstraintCategory { InputConstruction, VariableConstraint, InputRelationship, SetupTeardown };

std::string_view to_string(ConstraintCategory c);
// Human label used in prompts, e.g. "Input construction methods".
std::string_view category_label(ConstraintCategory c);
// Case/punctuation-insensitive; accepts the enum names and the labels.
std::optional<ConstraintCategory> parse_category(std::string_view text);

struct FunctionConstraint {
  ConstraintCategory category = ConstraintCategory::VariableConstraint;
  std::string statement;
  std::string rationale;
  std::vector<std::string> referenced_symbols;

  bool operator==(const FunctionConstraint&) const = default;
};

struct ConstraintReport {
  std::string target;  // project::signature
  std::string description;
  std::vector<FunctionConstraint> constraints;

  bool operator==(const ConstraintReport&) const = default;
};

// <description>...</description> followed by repeated
//   <constraint category="VariableConstraint">
//     <statement>...</statement> <rationale>...</rationale> <symbols>a, b</symbols>
//   </constraint>
// A constraint body without <statement> is taken as the statement itself.
// Text is whitespace-normalized; identical (category, statement) pairs are
// merged. Throws MalformedOutput.
ConstraintReport parse_constraint_report(std::string_view text);
// Canonical tagged form; parse_constraint_report(serialize(r)) == r for
// normalized reports (target is not serialized).
std::string serialize_constraint_report(const ConstraintReport& report);

// Text bound into writer/analyzer prompts. Every statement appears verbatim.
std::string render_constraints_for_prompt(const ConstraintReport* report);
inline constexpr std::string_view kNoConstraints = "No constraints available.";

struct FeasibilityVerdict {
  bool feasible = false;
  std::string analysis;
  std::string source_code_evidence;
  std::string recommendations;

  bool operator==(const FeasibilityVerdict&) const = default;
};

// Sections <feasible> (True/False, any case), <analysis> (required,
// non-empty), <source_code_evidence>, <recommendations> (required non-empty
// when infeasible). Throws MalformedOutput.
FeasibilityVerdict parse_feasibility_output(std::string_view text);
std::string serialize_feasibility(const FeasibilityVerdict& verdict);

enum class PromptVariant { Detailed, Simple };

struct FunctionAnalysis {
  AgentSession session;
  std::optional<ConstraintReport> report;  // absent when the session failed
};

struct CrashValidation {
  AgentSession session;
  std::optional<FeasibilityVerdict> verdict;  // absent when the session failed
};

Bindings function_analyzer_bindings(const BenchmarkFunction& fn);
Bindings crash_validator_bindings(const BenchmarkFunction& fn, const CrashReport& crash);

// Runs the Function Analyzer; never throws for agent failures (the session
// records them). `tools` is usually a ToolboxRunner over the indexed checkout.
FunctionAnalysis run_function_analyzer(const BenchmarkFunction& fn, LlmBackend& backend,
                                       ToolRunner& tools, const RunLimits& limits = {},
                                       PromptVariant variant = PromptVariant::Detailed);
// Throwing form: MalformedOutput / ToolBudgetExhausted.
ConstraintReport analyze_function(const BenchmarkFunction& fn, LlmBackend& backend,
                                  ToolRunner& tools, const RunLimits& limits = {},
                                  PromptVariant variant = PromptVariant::Detailed);

// Requires crash.classification == ProgramError (PreconditionViolation
// otherwise; the backend is never consulted).
CrashValidation run_crash_validator(const BenchmarkFunction& fn, const CrashReport& crash,
                                    LlmBackend& backend, ToolRunner& tools,
                                    const RunLimits& limits = {},
                                    PromptVariant variant = PromptVariant::Detailed);
FeasibilityVerdict validate_crash(const BenchmarkFunction& fn, const CrashReport& crash,
                                  LlmBackend& backend, ToolRunner& tools,
                                  const RunLimits& limits = {},
                                  PromptVariant variant = PromptVariant::Detailed);

}  // namespace crashsift
