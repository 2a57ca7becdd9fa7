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

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace crashsift {

struct ProcessOptions {
  std::filesystem::path working_dir;
  std::chrono::milliseconds timeout{10'000};
  // Bytes kept per stream; the rest is drained and dropped.
  std::size_t output_cap = 64 * 1024;
  std::vector<std::pair<std::string, std::string>> extra_env;
};

struct ProcessResult {
  // Exit code, or 128 + signal number when the child was killed.
  int exit_status = 0;
  std::string stdout_text;
  std::string stderr_text;
  bool stdout_truncated = false;
  bool stderr_truncated = false;
  bool timed_out = false;
};

// Runs argv[0] (PATH lookup) without a shell. stdin is /dev/null. The child
// gets its own process group so a timeout kills everything it spawned.
ProcessResult run_process(const std::vector<std::string>& argv,
                          const ProcessOptions& options);

}  // namespace crashsift
