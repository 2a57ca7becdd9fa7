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

#include "crashsift/analyzers.hpp"

#include <cctype>
#include <set>
#include <sstream>

#include "crashsift/agents.hpp"
#include "crashsift/error.hpp"
#include "crashsift/tags.hpp"
#include "crashsift/util.hpp"

namespace crashsift {
namespace {

constexpr std::size_t kMaxLogBytes = 16 * 1024;

std::string alnum_lower(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

[[noreturn]] void malformed(const std::string& why) { throw Error(ErrorKind::MalformedOutput, why); }

}  // namespace

std::string function_name_from_signature(std::string_view signature) {
  std::string_view s = trim(signature);
  auto paren = s.find('(');
  if (paren != std::string_view::npos) s = trim(s.substr(0, paren));
  std::size_t start = s.size();
  while (start > 0) {
    char c = s[start - 1];
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' || c == '~') {
      --start;
    } else {
      break;
    }
  }
  return std::string(s.substr(start));
}

std::string function_hash(const BenchmarkFunction& fn) {
  return sha256_hex(fn.project_name + "\n" + fn.function_signature).substr(0, 16);
}

std::string_view to_string(ConstraintCategory c) {
  switch (c) {
    case ConstraintCategory::InputConstruction: return "InputConstruction";
    case ConstraintCategory::VariableConstraint: return "VariableConstraint";
    case ConstraintCategory::InputRelationship: return "InputRelationship";
    case ConstraintCategory::SetupTeardown: return "SetupTeardown";
  }
  return "?";
}

std::string_view category_label(ConstraintCategory c) {
  switch (c) {
    case ConstraintCategory::InputConstruction: return "Input construction methods";
    case ConstraintCategory::VariableConstraint: return "Variable constraints";
    case ConstraintCategory::InputRelationship: return "Input relationships";
    case ConstraintCategory::SetupTeardown: return "Setup and teardown functions";
  }
  return "?";
}

std::optional<ConstraintCategory> parse_category(std::string_view text) {
  const std::string key = alnum_lower(text);
  if (key.empty()) return std::nullopt;
  static const std::pair<const char*, ConstraintCategory> kNames[] = {
      {"inputconstruction", ConstraintCategory::InputConstruction},
      {"inputconstructionmethod", ConstraintCategory::InputConstruction},
      {"inputconstructionmethods", ConstraintCategory::InputConstruction},
      {"variableconstraint", ConstraintCategory::VariableConstraint},
      {"variableconstraints", ConstraintCategory::VariableConstraint},
      {"inputrelationship", ConstraintCategory::InputRelationship},
      {"inputrelationships", ConstraintCategory::InputRelationship},
      {"setupteardown", ConstraintCategory::SetupTeardown},
      {"setupandteardown", ConstraintCategory::SetupTeardown},
      {"setupteardownfunctions", ConstraintCategory::SetupTeardown},
      {"setupandteardownfunctions", ConstraintCategory::SetupTeardown},
  };
  for (const auto& [name, cat] : kNames) {
    if (key == name) return cat;
  }
  return std::nullopt;
}

ConstraintReport parse_constraint_report(std::string_view text) {
  if (trim(text).empty()) malformed("empty output");
  ConstraintReport report;
  auto desc = output_section(text, "description");
  if (!desc) malformed("missing <description> section");
  report.description = normalize_whitespace(*desc);
  if (report.description.empty()) malformed("empty <description>");

  std::vector<TagElement> elements;
  try {
    elements = find_elements(text, "constraint");
  } catch (const Error& e) {
    malformed(e.what());
  }
  std::set<std::pair<ConstraintCategory, std::string>> seen;
  for (const auto& el : elements) {
    auto attr = el.attributes.find("category");
    if (attr == el.attributes.end()) malformed("<constraint> without a category attribute");
    auto category = parse_category(attr->second);
    if (!category) malformed("unknown constraint category '" + attr->second + "'");

    FunctionConstraint c;
    c.category = *category;
    if (auto st = output_section(el.body, "statement")) {
      c.statement = normalize_whitespace(*st);
      if (auto r = output_section(el.body, "rationale")) c.rationale = normalize_whitespace(*r);
      if (auto sym = output_section(el.body, "symbols")) {
        std::stringstream ss(*sym);
        std::string item;
        while (std::getline(ss, item, ',')) {
          std::string name = normalize_whitespace(item);
          if (!name.empty()) c.referenced_symbols.push_back(std::move(name));
        }
      }
    } else {
      c.statement = normalize_whitespace(el.body);
    }
    if (c.statement.empty()) malformed("constraint with an empty statement");
    if (seen.emplace(c.category, c.statement).second) report.constraints.push_back(std::move(c));
  }
  return report;
}

std::string serialize_constraint_report(const ConstraintReport& report) {
  std::ostringstream out;
  out << "<description>\n" << report.description << "\n</description>\n";
  for (const auto& c : report.constraints) {
    out << "<constraint category=\"" << to_string(c.category) << "\">\n"
        << "<statement>" << c.statement << "</statement>\n"
        << "<rationale>" << c.rationale << "</rationale>\n"
        << "<symbols>";
    for (std::size_t i = 0; i < c.referenced_symbols.size(); ++i) {
      out << (i ? ", " : "") << c.referenced_symbols[i];
    }
    out << "</symbols>\n</constraint>\n";
  }
  return out.str();
}

std::string render_constraints_for_prompt(const ConstraintReport* report) {
  if (report == nullptr || report->constraints.empty()) return std::string(kNoConstraints);
  std::ostringstream out;
  out << "\n";
  for (const auto& c : report->constraints) {
    out << "- [" << category_label(c.category) << "] " << c.statement;
    if (!c.rationale.empty()) out << " Rationale: " << c.rationale;
    out << "\n";
  }
  return out.str();
}

FeasibilityVerdict parse_feasibility_output(std::string_view text) {
  auto f = output_section(text, "feasible");
  if (!f) malformed("missing <feasible> section");
  FeasibilityVerdict v;
  const std::string value = to_lower(trim(*f));
  if (value == "true") {
    v.feasible = true;
  } else if (value == "false") {
    v.feasible = false;
  } else {
    malformed("<feasible> must be True or False, got '" + std::string(trim(*f)) + "'");
  }
  auto analysis = output_section(text, "analysis");
  if (!analysis || trim(*analysis).empty()) malformed("missing or empty <analysis> section");
  v.analysis = std::string(trim(*analysis));
  if (auto e = output_section(text, "source_code_evidence")) v.source_code_evidence = std::string(trim(*e));
  if (auto r = output_section(text, "recommendations")) v.recommendations = std::string(trim(*r));
  if (!v.feasible && v.recommendations.empty()) {
    malformed("an infeasible verdict needs non-empty <recommendations>");
  }
  return v;
}

std::string serialize_feasibility(const FeasibilityVerdict& v) {
  std::ostringstream out;
  out << "<feasible>" << (v.feasible ? "True" : "False") << "</feasible>\n"
      << "<analysis>\n" << v.analysis << "\n</analysis>\n"
      << "<source_code_evidence>\n" << v.source_code_evidence << "\n</source_code_evidence>\n"
      << "<recommendations>\n" << v.recommendations << "\n</recommendations>\n";
  return out.str();
}

Bindings function_analyzer_bindings(const BenchmarkFunction& fn) {
  return {{"project", fn.project_name},
          {"function_signature", fn.function_signature},
          {"function_source", fn.source_code}};
}

Bindings crash_validator_bindings(const BenchmarkFunction& fn, const CrashReport& crash) {
  std::string logs = crash.logs;
  if (logs.size() > kMaxLogBytes) {
    logs.resize(kMaxLogBytes);
    logs += "\n[log truncated]";
  }
  return {{"project", fn.project_name},
          {"function_signature", fn.function_signature},
          {"crash_type", crash.crash_type},
          {"stacktrace", crash.stacktrace_text()},
          {"crash_logs", logs},
          {"root_cause", crash.root_cause}};
}

FunctionAnalysis run_function_analyzer(const BenchmarkFunction& fn, LlmBackend& backend,
                                       ToolRunner& tools, const RunLimits& limits,
                                       PromptVariant variant) {
  std::string name = kFunctionAnalyzer;
  if (variant == PromptVariant::Simple) name += kSimpleSuffix;
  FunctionAnalysis out;
  out.session = run_agent(agent_spec(name), function_analyzer_bindings(fn), backend, tools, limits);
  if (out.session.completed()) {
    out.report = parse_constraint_report(out.session.final_output);
    out.report->target = fn.project_name + "::" + fn.function_signature;
  }
  return out;
}

ConstraintReport analyze_function(const BenchmarkFunction& fn, LlmBackend& backend,
                                  ToolRunner& tools, const RunLimits& limits,
                                  PromptVariant variant) {
  auto result = run_function_analyzer(fn, backend, tools, limits, variant);
  require_completed(result.session);
  return *result.report;
}

CrashValidation run_crash_validator(const BenchmarkFunction& fn, const CrashReport& crash,
                                    LlmBackend& backend, ToolRunner& tools,
                                    const RunLimits& limits, PromptVariant variant) {
  if (crash.classification != CrashClassification::ProgramError) {
    throw Error(ErrorKind::PreconditionViolation,
                "crash validation only applies to crashes classified as ProgramError");
  }
  std::string name = kCrashValidator;
  if (variant == PromptVariant::Simple) name += kSimpleSuffix;
  CrashValidation out;
  out.session =
      run_agent(agent_spec(name), crash_validator_bindings(fn, crash), backend, tools, limits);
  if (out.session.completed()) out.verdict = parse_feasibility_output(out.session.final_output);
  return out;
}

FeasibilityVerdict validate_crash(const BenchmarkFunction& fn, const CrashReport& crash,
                                  LlmBackend& backend, ToolRunner& tools,
                                  const RunLimits& limits, PromptVariant variant) {
  auto result = run_crash_validator(fn, crash, backend, tools, limits, variant);
  require_completed(result.session);
  return *result.verdict;
}

}  // namespace crashsift
