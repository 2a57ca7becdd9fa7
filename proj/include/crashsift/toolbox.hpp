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

// Source-exploration tools for agents: a sandboxed read-only shell search
// over a project checkout, and a heuristic C/C++ symbol index answering
// definition and caller queries.

#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace crashsift {

enum class Language { C, CPlusPlus };

std::string_view to_string(Language lang);
Language parse_language(std::string_view text);

class ProjectCheckout {
 public:
  // Throws IOFailure unless root is an existing directory.
  ProjectCheckout(std::string project_name, const std::filesystem::path& root,
                  Language language = Language::C);

  const std::string& project_name() const { return project_name_; }
  // Canonical absolute path.
  const std::filesystem::path& root() const { return root_; }
  Language language() const { return language_; }

  // Resolves `relative` against root, following symlinks. Throws PathEscape
  // when the result is not under root.
  std::filesystem::path resolve(std::string_view relative) const;

  std::filesystem::path metadata_dir() const { return root_ / ".crashsift"; }
  std::filesystem::path index_path() const { return metadata_dir() / "index.json"; }

 private:
  std::string project_name_;
  std::filesystem::path root_;
  Language language_;
};

struct CommandResult {
  std::string command;
  int exit_status = 0;
  std::string stdout_text;
  std::string stderr_text;
  bool truncated = false;
};

struct SearchLimits {
  std::chrono::milliseconds timeout{10'000};
  std::size_t output_cap_bytes = 64 * 1024;
};

inline constexpr std::string_view kAllowedPrograms[] = {
    "grep", "cat", "ls", "find", "head", "tail", "wc", "sed"};

// Splits a command line into words with POSIX-like quoting. Unquoted shell
// metacharacters (pipes, redirection, substitution, separators) are rejected
// with DisallowedCommand since no shell ever runs the command.
std::vector<std::string> split_command(std::string_view command);

// Throws DisallowedCommand or PathEscape without running anything.
void check_command(const ProjectCheckout& checkout, const std::vector<std::string>& argv);

CommandResult code_search(const ProjectCheckout& checkout, std::string_view command,
                          const SearchLimits& limits = {});

// --- symbol index ---------------------------------------------------------

struct SymbolEntry {
  std::string file;  // relative to the checkout root, '/' separated
  int line_start = 0;
  int line_end = 0;
  std::string signature;
  bool is_definition = true;

  bool operator==(const SymbolEntry&) const = default;
};

struct CallEdge {
  std::string caller;  // qualified name of the enclosing definition
  std::string callee;  // resolved qualified name, or the name as written
  std::string file;
  int line = 0;
  bool external = false;  // callee has no definition in the index

  bool operator==(const CallEdge&) const = default;
};

struct SymbolIndex {
  std::map<std::string, std::vector<SymbolEntry>> entries;
  std::vector<CallEdge> call_edges;

  std::size_t definition_count() const;
  bool operator==(const SymbolIndex&) const = default;
};

// Last `::`-separated component.
std::string_view base_name(std::string_view qualified);

SymbolIndex build_symbol_index(const ProjectCheckout& checkout);

struct FunctionSource {
  std::string name;
  std::string signature;
  std::string source_text;
  std::string file;
  int line_start = 0;
};

// Matches the exact qualified name, or the unqualified name against the last
// component of every qualified definition. Ordered by (file, line). Throws
// NotFound when nothing matches.
std::vector<FunctionSource> function_search(const SymbolIndex& index,
                                            const ProjectCheckout& checkout,
                                            std::string_view function_name);

struct CallerSite {
  std::string caller;
  std::string file;
  int line = 0;

  bool operator==(const CallerSite&) const = default;
  auto operator<=>(const CallerSite&) const = default;
};

std::vector<CallerSite> find_callers(const SymbolIndex& index, std::string_view function_name);

// Path components and name affixes that mark test-only code.
bool is_test_location(std::string_view file);
bool is_test_name(std::string_view qualified_name);

// Non-test definitions that no non-test code calls. Calls made from test or
// fuzz harnesses are ignored, so a library API exercised by its own tests is
// still an entry point.
std::vector<std::string> entry_points(const SymbolIndex& index);

nlohmann::ordered_json to_json(const SymbolIndex& index);
SymbolIndex symbol_index_from_json(const nlohmann::ordered_json& j);

void save_index(const SymbolIndex& index, const std::filesystem::path& path);
SymbolIndex load_index(const std::filesystem::path& path);

}  // namespace crashsift
