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

#include <algorithm>
#include <cctype>
#include <regex>

#include "crashsift/error.hpp"
#include "crashsift/process.hpp"
#include "crashsift/toolbox.hpp"
#include "crashsift/util.hpp"

namespace fs = std::filesystem;

namespace crashsift {

std::string_view to_string(Language lang) {
  return lang == Language::C ? "C" : "CPlusPlus";
}

Language parse_language(std::string_view text) {
  auto t = to_lower(trim(text));
  if (t == "c") return Language::C;
  if (t == "c++" || t == "cpp" || t == "cplusplus" || t == "cxx") return Language::CPlusPlus;
  throw Error(ErrorKind::InvalidConfig, "unknown language '" + std::string(text) + "'");
}

ProjectCheckout::ProjectCheckout(std::string project_name, const fs::path& root,
                                 Language language)
    : project_name_(std::move(project_name)), language_(language) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw Error(ErrorKind::IOFailure, "checkout root is not a directory: " + root.string());
  }
  root_ = fs::canonical(root);
}

fs::path ProjectCheckout::resolve(std::string_view relative) const {
  fs::path p(relative);
  fs::path joined = p.is_absolute() ? p : root_ / p;
  std::error_code ec;
  fs::path resolved = fs::weakly_canonical(joined, ec);
  if (ec) resolved = joined.lexically_normal();
  if (!is_within(root_, resolved)) {
    throw Error(ErrorKind::PathEscape,
                "'" + std::string(relative) + "' resolves outside the checkout");
  }
  return resolved;
}

std::vector<std::string> split_command(std::string_view command) {
  std::vector<std::string> words;
  std::string cur;
  bool in_word = false;
  std::size_t i = 0;
  auto reject = [&](std::string_view why) {
    throw Error(ErrorKind::DisallowedCommand, std::string(why) + " in: " + std::string(command));
  };
  while (i < command.size()) {
    char c = command[i];
    if (c == '\'') {
      auto end = command.find('\'', i + 1);
      if (end == std::string_view::npos) reject("unterminated quote");
      cur.append(command.substr(i + 1, end - i - 1));
      in_word = true;
      i = end + 1;
    } else if (c == '"') {
      ++i;
      bool closed = false;
      while (i < command.size()) {
        char d = command[i];
        if (d == '"') {
          closed = true;
          ++i;
          break;
        }
        if (d == '`' || (d == '$' && i + 1 < command.size() &&
                         (command[i + 1] == '(' || command[i + 1] == '{' ||
                          std::isalpha(static_cast<unsigned char>(command[i + 1])) ||
                          command[i + 1] == '_'))) {
          reject("substitution");
        }
        if (d == '\\' && i + 1 < command.size() &&
            (command[i + 1] == '"' || command[i + 1] == '\\' || command[i + 1] == '$' ||
             command[i + 1] == '`')) {
          cur.push_back(command[i + 1]);
          i += 2;
          continue;
        }
        cur.push_back(d);
        ++i;
      }
      if (!closed) reject("unterminated quote");
      in_word = true;
    } else if (c == '\\') {
      if (i + 1 >= command.size()) reject("trailing backslash");
      cur.push_back(command[i + 1]);
      in_word = true;
      i += 2;
    } else if (c == ' ' || c == '\t') {
      if (in_word) words.push_back(std::move(cur));
      cur.clear();
      in_word = false;
      ++i;
    } else if (std::string_view("|&;<>`$(){}\n\r").find(c) != std::string_view::npos) {
      reject(std::string("shell metacharacter '") + c + "'");
    } else {
      cur.push_back(c);
      in_word = true;
      ++i;
    }
  }
  if (in_word) words.push_back(std::move(cur));
  if (words.empty()) reject("empty command");
  return words;
}

namespace {

bool starts_with(std::string_view s, std::string_view p) { return s.substr(0, p.size()) == p; }

const std::regex& sed_readonly_script() {
  // Address ranges followed by p, d, q or =. Anything else (w, e, r, s///w)
  // is refused.
  static const std::regex re(
      R"(^\s*((\d+|\$|/[^/]*/)(\s*,\s*(\d+|\$|/[^/]*/))?)?\s*[pdq=]\s*$)");
  return re;
}

void check_sed(const std::vector<std::string>& argv, std::vector<std::string>& operands) {
  bool have_script = false;
  for (std::size_t i = 1; i < argv.size(); ++i) {
    const auto& a = argv[i];
    if (starts_with(a, "-i") || starts_with(a, "--in-place") || a == "-s" ||
        starts_with(a, "--separate") || starts_with(a, "-f") || starts_with(a, "--file")) {
      throw Error(ErrorKind::DisallowedCommand, "sed option '" + a + "' is not read-only");
    }
    if (a == "-e" || a == "--expression") {
      if (i + 1 >= argv.size()) throw Error(ErrorKind::DisallowedCommand, "sed -e without script");
      if (!std::regex_match(argv[i + 1], sed_readonly_script())) {
        throw Error(ErrorKind::DisallowedCommand, "sed script '" + argv[i + 1] + "' is not read-only");
      }
      have_script = true;
      ++i;
      continue;
    }
    if (a == "-n" || a == "--quiet" || a == "--silent" || a == "-E" || a == "-r" ||
        a == "--regexp-extended") {
      continue;
    }
    if (starts_with(a, "-") && a != "-") {
      throw Error(ErrorKind::DisallowedCommand, "sed option '" + a + "' is not allowed");
    }
    if (!have_script) {
      if (!std::regex_match(a, sed_readonly_script())) {
        throw Error(ErrorKind::DisallowedCommand, "sed script '" + a + "' is not read-only");
      }
      have_script = true;
      continue;
    }
    operands.push_back(a);
  }
}

}  // namespace

void check_command(const ProjectCheckout& checkout, const std::vector<std::string>& argv) {
  if (argv.empty()) throw Error(ErrorKind::DisallowedCommand, "empty command");
  const std::string& program = argv[0];
  if (program.find('/') != std::string::npos ||
      std::find(std::begin(kAllowedPrograms), std::end(kAllowedPrograms), program) ==
          std::end(kAllowedPrograms)) {
    throw Error(ErrorKind::DisallowedCommand, "program '" + program + "' is not allowlisted");
  }

  std::vector<std::string> operands;
  if (program == "sed") {
    check_sed(argv, operands);
  } else {
    for (std::size_t i = 1; i < argv.size(); ++i) {
      const auto& a = argv[i];
      if (program == "find") {
        static const char* kFindWrites[] = {"-exec", "-execdir", "-ok", "-okdir", "-delete",
                                            "-fprint", "-fprint0", "-fprintf", "-fls",
                                            "-L", "-follow"};
        for (const char* w : kFindWrites) {
          if (a == w) throw Error(ErrorKind::DisallowedCommand, "find action '" + a + "' is not allowed");
        }
      }
      if (program == "tail" && (a == "-f" || a == "-F" || starts_with(a, "--follow"))) {
        throw Error(ErrorKind::DisallowedCommand, "tail follow mode is not allowed");
      }
      if (program == "grep" && (a == "-R" || a == "--dereference-recursive")) {
        throw Error(ErrorKind::DisallowedCommand, "grep -R follows symlinks; use -r");
      }
      if (starts_with(a, "-") && a.size() > 1) {
        auto eq = a.find('=');
        if (eq != std::string::npos) operands.push_back(a.substr(eq + 1));
        continue;
      }
      operands.push_back(a);
    }
  }
  for (const auto& op : operands) checkout.resolve(op);
}

CommandResult code_search(const ProjectCheckout& checkout, std::string_view command,
                          const SearchLimits& limits) {
  auto argv = split_command(command);
  check_command(checkout, argv);

  ProcessOptions opts;
  opts.working_dir = checkout.root();
  opts.timeout = limits.timeout;
  opts.output_cap = limits.output_cap_bytes;
  opts.extra_env = {{"LC_ALL", "C"}};
  auto pr = run_process(argv, opts);
  if (pr.timed_out) {
    throw Error(ErrorKind::Timeout, "command exceeded " +
                                        std::to_string(limits.timeout.count()) + " ms: " +
                                        std::string(command));
  }
  CommandResult result;
  result.command = std::string(command);
  result.exit_status = pr.exit_status;
  result.stdout_text = std::move(pr.stdout_text);
  result.stderr_text = std::move(pr.stderr_text);
  result.truncated = pr.stdout_truncated;
  return result;
}

}  // namespace crashsift
