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

#include "crashsift/tool_runner.hpp"

#include <sstream>

#include "crashsift/error.hpp"

namespace crashsift {

std::string format_command_result(const CommandResult& r, std::size_t cap) {
  std::ostringstream out;
  out << "$ " << r.command << "\nexit_status: " << r.exit_status << "\n" << r.stdout_text;
  if (!r.stdout_text.empty() && r.stdout_text.back() != '\n') out << "\n";
  if (!r.stderr_text.empty()) out << "[stderr]\n" << r.stderr_text;
  if (r.truncated) out << "\n[output truncated at " << cap << " bytes]\n";
  return out.str();
}

std::string ToolboxRunner::run(const ToolDirective& call) {
  try {
    if (call.name == kToolCodeSearch) {
      return format_command_result(code_search(checkout_, call.args, limits_),
                                   limits_.output_cap_bytes);
    }
    if (!index_) return "error: no symbol index is loaded for " + checkout_.project_name();
    if (call.name == kToolFunctionSearch) {
      std::ostringstream out;
      for (const auto& c : function_search(*index_, checkout_, call.args)) {
        out << "// " << c.file << ":" << c.line_start << "  (" << c.name << ")\n"
            << c.source_text << "\n";
      }
      std::string s = out.str();
      if (s.size() > limits_.output_cap_bytes) {
        s.resize(limits_.output_cap_bytes);
        s += "\n[output truncated]\n";
      }
      return s;
    }
    if (call.name == kToolFindCallers) {
      auto callers = find_callers(*index_, call.args);
      if (callers.empty()) return "no callers of " + call.args + " (root-level candidate)\n";
      std::ostringstream out;
      for (const auto& c : callers) out << c.file << ":" << c.line << " in " << c.caller << "\n";
      return out.str();
    }
    if (call.name == kToolEntryPoints) {
      std::ostringstream out;
      for (const auto& name : entry_points(*index_)) out << name << "\n";
      return out.str();
    }
  } catch (const Error& e) {
    return std::string("error: ") + e.what();
  }
  return "error: unknown tool '" + call.name + "'";
}

}  // namespace crashsift
