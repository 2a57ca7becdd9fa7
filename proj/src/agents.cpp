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

#include "crashsift/agents.hpp"

#include <algorithm>

#include "crashsift/error.hpp"
#include "crashsift/tags.hpp"
#include "crashsift/tool_runner.hpp"
#include "crashsift/util.hpp"

namespace crashsift {
namespace detail {
extern const std::pair<std::string_view, std::string_view> kPromptTemplates[];
extern const std::size_t kPromptTemplateCount;
}  // namespace detail

namespace {

const std::vector<std::string> kAnalysisTools = {kToolCodeSearch, kToolFunctionSearch,
                                                 kToolFindCallers, kToolEntryPoints};
// The compiler and debugger tools of the original writer/analyzer agents are
// not part of this toolbox; those agents get code search only.
const std::vector<std::string> kBaselineTools = {kToolCodeSearch};

}  // namespace

bool receives_constraints(std::string_view agent) {
  return agent == kPrototyper || agent == kEnhancer || agent == kCoverageAnalyzer ||
         agent == kCrashAnalyzer;
}

bool is_writer(std::string_view agent) { return agent == kPrototyper || agent == kEnhancer; }

std::string_view prompt_template(std::string_view name) {
  for (std::size_t i = 0; i < detail::kPromptTemplateCount; ++i) {
    if (detail::kPromptTemplates[i].first == name) return detail::kPromptTemplates[i].second;
  }
  throw Error(ErrorKind::NotFound, "no prompt template '" + std::string(name) + "'");
}

std::vector<std::string> prompt_template_names() {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < detail::kPromptTemplateCount; ++i) {
    out.emplace_back(detail::kPromptTemplates[i].first);
  }
  std::sort(out.begin(), out.end());
  return out;
}

AgentSpec agent_spec(std::string_view name) {
  std::string_view base = name;
  if (base.size() > kSimpleSuffix.size() &&
      base.substr(base.size() - kSimpleSuffix.size()) == kSimpleSuffix) {
    base.remove_suffix(kSimpleSuffix.size());
    if (base != kFunctionAnalyzer && base != kCrashValidator) {
      throw Error(ErrorKind::NotFound, "no simple prompt variant for '" + std::string(base) + "'");
    }
  }
  AgentSpec spec;
  spec.name = std::string(name);
  spec.system_prompt = std::string(prompt_template(name));
  if (base == kFunctionAnalyzer) {
    spec.tool_set = kAnalysisTools;
    spec.output_parser = "constraint_report";
  } else if (base == kCrashValidator) {
    spec.tool_set = kAnalysisTools;
    spec.output_parser = "feasibility";
  } else if (base == kPrototyper || base == kEnhancer) {
    spec.tool_set = kBaselineTools;
    spec.output_parser = "fuzz_driver";
  } else if (base == kCoverageAnalyzer) {
    spec.tool_set = kBaselineTools;
    spec.output_parser = "coverage_analysis";
  } else if (base == kCrashAnalyzer) {
    spec.tool_set = kBaselineTools;
    spec.output_parser = "crash_analysis";
  } else {
    throw Error(ErrorKind::NotFound, "unknown agent '" + std::string(name) + "'");
  }
  return spec;
}

std::vector<std::string> agent_names() {
  return {kFunctionAnalyzer, kPrototyper,     kEnhancer,
          kCoverageAnalyzer, kCrashAnalyzer, kCrashValidator};
}

std::string parse_fuzz_driver_output(std::string_view text) {
  auto body = output_section(text, "fuzz_driver");
  if (!body) throw Error(ErrorKind::MalformedOutput, "missing <fuzz_driver> section");
  std::string_view src = trim(*body);
  if (src.substr(0, 3) == "```") {
    auto nl = src.find('\n');
    src = nl == std::string_view::npos ? std::string_view() : src.substr(nl + 1);
    src = trim(src);
    if (src.size() >= 3 && src.substr(src.size() - 3) == "```") src.remove_suffix(3);
    src = trim(src);
  }
  if (src.find("LLVMFuzzerTestOneInput") == std::string_view::npos) {
    throw Error(ErrorKind::MalformedOutput, "driver does not define LLVMFuzzerTestOneInput");
  }
  return std::string(src) + "\n";
}

CrashAnalysis parse_crash_analysis_output(std::string_view text) {
  auto cls = output_section(text, "classification");
  if (!cls) throw Error(ErrorKind::MalformedOutput, "missing <classification> section");
  auto parsed = parse_classification(trim(*cls));
  if (!parsed) {
    throw Error(ErrorKind::MalformedOutput,
                "classification must be ProgramError or FuzzDriverError, got '" +
                    std::string(trim(*cls)) + "'");
  }
  auto root = output_section(text, "root_cause");
  if (!root || trim(*root).empty()) {
    throw Error(ErrorKind::MalformedOutput, "missing or empty <root_cause> section");
  }
  return {*parsed, std::string(trim(*root))};
}

std::string parse_coverage_analysis_output(std::string_view text) {
  auto s = output_section(text, "suggestions");
  if (!s || trim(*s).empty()) {
    throw Error(ErrorKind::MalformedOutput, "missing or empty <suggestions> section");
  }
  return std::string(trim(*s));
}

}  // namespace crashsift
