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

#include <memory>

#include "crashsift/agent.hpp"
#include "crashsift/toolbox.hpp"

namespace crashsift {

inline constexpr const char* kToolCodeSearch = "code_search";
inline constexpr const char* kToolFunctionSearch = "function_search";
inline constexpr const char* kToolFindCallers = "find_callers";
inline constexpr const char* kToolEntryPoints = "entry_points";

// Dispatches agent tool calls onto the toolbox for one checkout. The index is
// shared read-only between sessions.
class ToolboxRunner : public ToolRunner {
 public:
  ToolboxRunner(const ProjectCheckout& checkout, std::shared_ptr<const SymbolIndex> index,
                SearchLimits limits = {})
      : checkout_(checkout), index_(std::move(index)), limits_(limits) {}

  std::string run(const ToolDirective& call) override;

 private:
  const ProjectCheckout& checkout_;
  std::shared_ptr<const SymbolIndex> index_;
  SearchLimits limits_;
};

std::string format_command_result(const CommandResult& r, std::size_t cap);

}  // namespace crashsift
