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

#include "support.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace fs = std::filesystem;

namespace crashsift::testing {

fs::path fixture_path(const std::string& relative) { return fs::path(CRASHSIFT_FIXTURES_DIR) / relative; }

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

TempDir::TempDir(const std::string& prefix) {
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  for (int i = 0; i < 100; ++i) {
    auto name = prefix + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" +
                std::to_string((stamp ^ rd()) & 0xffffff);
    auto p = fs::temp_directory_path() / name;
    if (fs::create_directory(p)) {
      path_ = p;
      return;
    }
  }
  throw std::runtime_error("cannot create temp dir");
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

fs::path copy_fixture(const std::string& relative, const fs::path& dest) {
  fs::create_directories(dest);
  fs::copy(fixture_path(relative), dest, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
  return dest;
}

// --- oracle -----------------------------------------------------------------

namespace {

bool is_ident(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Comments, string/char literals and preprocessor lines become spaces;
// newlines survive so line numbers stay put.
std::string blank_noise(const std::string& s) {
  std::string out = s;
  std::size_t i = 0;
  bool line_start = true;
  auto blank = [&](std::size_t k) {
    if (out[k] != '\n') out[k] = ' ';
  };
  while (i < s.size()) {
    char c = s[i];
    if (line_start && c == '#') {
      while (i < s.size() && s[i] != '\n') {
        // Continuation lines belong to the directive.
        if (s[i] == '\\' && i + 1 < s.size() && s[i + 1] == '\n') blank(i++);
        blank(i++);
      }
      continue;
    }
    if (c == '\n') {
      line_start = true;
      ++i;
      continue;
    }
    if (c != ' ' && c != '\t') line_start = false;
    if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
      while (i < s.size() && s[i] != '\n') blank(i++);
    } else if (c == '/' && i + 1 < s.size() && s[i + 1] == '*') {
      blank(i++);
      blank(i++);
      while (i < s.size() && !(s[i] == '*' && i + 1 < s.size() && s[i + 1] == '/')) blank(i++);
      if (i < s.size()) blank(i++);
      if (i < s.size()) blank(i++);
    } else if (c == '"' || c == '\'') {
      blank(i++);
      while (i < s.size() && s[i] != c) {
        if (s[i] == '\\' && i + 1 < s.size()) blank(i++);
        blank(i++);
      }
      if (i < s.size()) blank(i++);
    } else {
      ++i;
    }
  }
  return out;
}

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {
      "if", "for", "while", "switch", "return", "sizeof", "catch", "alignof", "decltype",
      "static_cast", "reinterpret_cast", "const_cast", "dynamic_cast", "new", "delete",
      "defined", "typeid", "noexcept", "static_assert", "alignas", "do", "else", "case"};
  return k;
}

int line_of(const std::string& s, std::size_t pos) {
  return 1 + static_cast<int>(std::count(s.begin(), s.begin() + static_cast<long>(pos), '\n'));
}

// Qualified identifier ending just before `end` (exclusive), skipping blanks.
std::pair<std::string, std::size_t> ident_before(const std::string& s, std::size_t end) {
  std::size_t j = end;
  while (j > 0 && std::isspace(static_cast<unsigned char>(s[j - 1]))) --j;
  std::size_t stop = j;
  while (j > 0 && (is_ident(s[j - 1]) || s[j - 1] == ':' || s[j - 1] == '~')) --j;
  std::string name = s.substr(j, stop - j);
  while (!name.empty() && name.front() == ':') name.erase(0, 1);
  return {name, j};
}

std::string last_component(const std::string& q) {
  auto p = q.rfind("::");
  return p == std::string::npos ? q : q.substr(p + 2);
}

bool source_file(const fs::path& p) {
  static const std::set<std::string> ext = {".c", ".cc", ".cpp", ".cxx", ".h", ".hh", ".hpp", ".hxx"};
  return ext.count(p.extension().string()) > 0;
}

bool test_dir(const std::string& rel) {
  fs::path p(rel);
  for (auto it = p.begin(); it != p.end(); ++it) {
    if (std::next(it) == p.end()) break;
    std::string part = it->string();
    std::transform(part.begin(), part.end(), part.begin(), [](unsigned char c) { return std::tolower(c); });
    if (part == "test" || part == "tests" || part == "fuzz") return true;
  }
  return false;
}

bool test_name(const std::string& q) {
  std::string b = last_component(q);
  auto ends = [&](const std::string& suf) {
    return b.size() >= suf.size() && b.compare(b.size() - suf.size(), suf.size(), suf) == 0;
  };
  return b.rfind("test_", 0) == 0 || b.rfind("Test", 0) == 0 || ends("_test");
}

void scan_file(const std::string& rel, const std::string& raw, OracleScan& out) {
  const std::string s = blank_noise(raw);
  int depth = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == '}') {
      --depth;
      ++i;
      continue;
    }
    if (c != '{') {
      ++i;
      continue;
    }
    if (depth != 0) {
      ++depth;
      ++i;
      continue;
    }
    // Depth-zero brace: a definition when preceded by `)` plus optional
    // trailing qualifiers.
    std::size_t j = i;
    for (;;) {
      while (j > 0 && std::isspace(static_cast<unsigned char>(s[j - 1]))) --j;
      auto [word, start] = ident_before(s, j);
      if (word == "const" || word == "noexcept" || word == "override") {
        j = start;
        continue;
      }
      break;
    }
    std::string name;
    if (j > 0 && s[j - 1] == ')') {
      int paren = 0;
      std::size_t k = j;
      while (k > 0) {
        --k;
        if (s[k] == ')') ++paren;
        if (s[k] == '(' && --paren == 0) break;
      }
      name = ident_before(s, k).first;
    }
    // Find the matching close brace.
    std::size_t body_end = i + 1;
    int d = 1;
    while (body_end < s.size() && d > 0) {
      if (s[body_end] == '{') ++d;
      if (s[body_end] == '}') --d;
      ++body_end;
    }
    if (name.empty() || keywords().count(last_component(name))) {
      ++depth;  // aggregate or namespace body: descend normally
      ++i;
      continue;
    }
    out.definitions.push_back({name, rel});
    for (std::size_t k = i + 1; k < body_end; ++k) {
      if (s[k] != '(') continue;
      auto [callee, start] = ident_before(s, k);
      if (callee.empty() || std::isdigit(static_cast<unsigned char>(callee[0]))) continue;
      if (keywords().count(last_component(callee))) continue;
      // `Type name(args);` declarations are not calls: skip when the token
      // before the name is itself an identifier that is not a keyword.
      auto [prev, prev_start] = ident_before(s, start);
      (void)prev_start;
      if (!prev.empty() && prev != "return" && prev != "else" && prev != "case" && prev != "do") continue;
      out.calls.push_back({name, callee, rel, line_of(s, start)});
    }
    i = body_end;
  }
}

}  // namespace

OracleScan oracle_scan(const fs::path& root) {
  OracleScan scan;
  std::vector<fs::path> files;
  for (auto it = fs::recursive_directory_iterator(root); it != fs::recursive_directory_iterator(); ++it) {
    if (it->path().filename().string().rfind('.', 0) == 0) {
      if (it->is_directory()) it.disable_recursion_pending();
      continue;
    }
    if (it->is_regular_file() && source_file(it->path())) files.push_back(it->path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) scan_file(fs::relative(f, root).generic_string(), read_text(f), scan);
  return scan;
}

std::vector<std::tuple<std::string, std::string, int>> oracle_callers(const OracleScan& scan,
                                                                      const std::string& name) {
  std::vector<std::tuple<std::string, std::string, int>> out;
  const std::string wanted = last_component(name);
  for (const auto& c : scan.calls) {
    if (last_component(c.callee) == wanted) out.emplace_back(c.caller, c.file, c.line);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::set<std::string> oracle_entry_points(const OracleScan& scan) {
  std::set<std::string> called;
  for (const auto& c : scan.calls) {
    if (test_dir(c.file) || test_name(c.caller)) continue;
    if (last_component(c.caller) == last_component(c.callee)) continue;
    called.insert(last_component(c.callee));
  }
  std::set<std::string> out;
  for (const auto& d : scan.definitions) {
    if (test_dir(d.file) || test_name(d.name)) continue;
    if (called.count(last_component(d.name))) continue;
    out.insert(d.name);
  }
  return out;
}

}  // namespace crashsift::testing
