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

#include "crashsift/agent.hpp"
#include "crashsift/agents.hpp"
#include "crashsift/analyzers.hpp"
#include "crashsift/error.hpp"
#include "crashsift/util.hpp"

namespace crashsift {

OutputValidator output_validator(std::string_view parser_id) {
  if (parser_id == "constraint_report") {
    return [](std::string_view t) { parse_constraint_report(t); };
  }
  if (parser_id == "feasibility") {
    return [](std::string_view t) { parse_feasibility_output(t); };
  }
  if (parser_id == "fuzz_driver") {
    return [](std::string_view t) { parse_fuzz_driver_output(t); };
  }
  if (parser_id == "crash_analysis") {
    return [](std::string_view t) { parse_crash_analysis_output(t); };
  }
  if (parser_id == "coverage_analysis") {
    return [](std::string_view t) { parse_coverage_analysis_output(t); };
  }
  if (parser_id == "any") {
    return [](std::string_view t) {
      if (trim(t).empty()) throw Error(ErrorKind::MalformedOutput, "empty response");
    };
  }
  throw Error(ErrorKind::InvalidConfig, "unknown output parser '" + std::string(parser_id) + "'");
}

}  // namespace crashsift
