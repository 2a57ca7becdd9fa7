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

// Helpers shared by the unit tests and the acceptance checks.

#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace crashsift::testing {

std::filesystem::path fixture_path(const std::string& relative);
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

// A fresh directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& prefix = "crashsift-test");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

// Copies a fixture tree into dest (indexing writes into the project, so
// tests never work on the committed copy).
std::filesystem::path copy_fixture(const std::string& relative, const std::filesystem::path& dest);

// Brute-force call scan used to cross-check the symbol index. It knows
// nothing about the index: it strips comments and literals, finds every
// `name(...) {` at brace depth zero as a definition, and records every
// `ident(` inside a definition body as a call.
struct OracleCall {
  std::string caller;  // as written at the definition, e.g. "LibRaw::unpack"
  std::string callee;  // as written at the call site
  std::string file;
  int line = 0;
  auto operator<=>(const OracleCall&) const = default;
};

struct OracleDefinition {
  std::string name;
  std::string file;
  auto operator<=>(const OracleDefinition&) const = default;
};

struct OracleScan {
  std::vector<OracleDefinition> definitions;
  std::vector<OracleCall> calls;
};

OracleScan oracle_scan(const std::filesystem::path& root);

// (caller, file, line) for every call whose last name component is `name`.
std::vector<std::tuple<std::string, std::string, int>> oracle_callers(const OracleScan& scan,
                                                                      const std::string& name);
// Definitions outside test directories (test/, tests/, fuzz/) and without a
// test-style name that no such definition calls.
std::set<std::string> oracle_entry_points(const OracleScan& scan);

}  // namespace crashsift::testing
