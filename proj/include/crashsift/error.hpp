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

#include <stdexcept>
#include <string>
#include <string_view>

namespace crashsift {

// Every failure the library reports carries one of these kinds. The CLI maps
// kinds onto its exit-code contract.
enum class ErrorKind {
  // toolbox
  DisallowedCommand,
  Timeout,
  PathEscape,
  EmptyProject,
  NotFound,
  // agent runtime
  BackendUnavailable,
  ToolBudgetExhausted,
  MalformedOutput,
  UnboundPlaceholder,
  UnknownTool,
  // pipeline / executor
  BuildFailure,
  ExecutorTimeout,
  NoCrashFound,
  SyncConflict,
  InvalidConfig,
  // replay
  UnbalancedTags,
  SpecMismatch,
  ExhaustedScript,
  // metrics
  InvalidBaseline,
  PairMismatch,
  PreconditionViolation,
  // generic
  IOFailure,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace crashsift
