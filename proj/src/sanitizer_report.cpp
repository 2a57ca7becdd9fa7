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

#include <cctype>
#include <charconv>
#include <sstream>

#include "crashsift/crash.hpp"
#include "crashsift/error.hpp"
#include "crashsift/util.hpp"

namespace crashsift {

std::string_view to_string(CrashClassification c) {
  return c == CrashClassification::ProgramError ? "ProgramError" : "FuzzDriverError";
}

std::optional<CrashClassification> parse_classification(std::string_view text) {
  std::string key;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (key == "programerror" || key == "programerrors") return CrashClassification::ProgramError;
  if (key == "fuzzdrivererror" || key == "fuzzdrivererrors" || key == "drivererror" ||
      key == "fuzzingdrivererror") {
    return CrashClassification::FuzzDriverError;
  }
  return std::nullopt;
}

std::string CrashReport::stacktrace_text() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < stacktrace.size(); ++i) {
    const auto& f = stacktrace[i];
    out << "#" << i << " " << f.function;
    if (!f.file.empty()) out << " " << f.file << ":" << f.line;
    out << "\n";
  }
  return out.str();
}

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(pos));
      break;
    }
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return lines;
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

struct ErrorLine {
  std::string sanitizer;
  std::string crash_type;
};

std::optional<ErrorLine> match_error_line(std::string_view line) {
  for (std::string_view marker : {std::string_view("ERROR: "), std::string_view("WARNING: ")}) {
    auto pos = line.find(marker);
    if (pos == std::string_view::npos) continue;
    std::string_view rest = line.substr(pos + marker.size());
    auto colon = rest.find(": ");
    if (colon == std::string_view::npos) continue;
    std::string_view tool = trim(rest.substr(0, colon));
    if (tool.empty() || tool.find(' ') != std::string_view::npos) continue;
    bool known = tool == "libFuzzer" ||
                 (tool.size() > 9 && tool.substr(tool.size() - 9) == "Sanitizer");
    if (!known) continue;
    std::string_view what = trim(rest.substr(colon + 2));
    for (std::string_view stop : {std::string_view(" on "), std::string_view(" at pc")}) {
      auto s = what.find(stop);
      if (s != std::string_view::npos) what = what.substr(0, s);
    }
    what = trim(what);
    if (what.empty()) continue;
    return ErrorLine{std::string(tool), std::string(what)};
  }
  auto pos = line.find("runtime error: ");
  if (pos != std::string_view::npos) {
    std::string_view what = trim(line.substr(pos + 15));
    return ErrorLine{"UndefinedBehaviorSanitizer", what.empty() ? "runtime-error" : std::string(what)};
  }
  return std::nullopt;
}

// "#3 0x4f0e3c in func /path/file.cc:12:7"
std::optional<StackFrame> match_frame(std::string_view line, const std::string& tag) {
  std::string_view s = trim(line);
  if (s.size() < 2 || s[0] != '#' || !std::isdigit(static_cast<unsigned char>(s[1]))) {
    return std::nullopt;
  }
  std::size_t i = 1;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i >= s.size() || !std::isspace(static_cast<unsigned char>(s[i]))) return std::nullopt;
  s = trim(s.substr(i));
  if (s.substr(0, 2) != "0x") return std::nullopt;
  std::size_t addr_end = 2;
  while (addr_end < s.size() && std::isxdigit(static_cast<unsigned char>(s[addr_end]))) ++addr_end;
  s = trim(s.substr(addr_end));

  StackFrame frame;
  frame.sanitizer_tag = tag;
  frame.function = "<unknown>";
  if (s.substr(0, 3) == "in ") {
    s = trim(s.substr(3));
    auto last_space = s.rfind(' ');
    std::string_view location;
    if (last_space == std::string_view::npos) {
      frame.function = std::string(s);
    } else {
      frame.function = std::string(trim(s.substr(0, last_space)));
      location = trim(s.substr(last_space + 1));
    }
    if (!location.empty() && location.front() != '(') {
      // file:line[:col]
      std::string_view loc = location;
      int a = 0;
      int b = 0;
      auto c1 = loc.rfind(':');
      if (c1 != std::string_view::npos && parse_int(loc.substr(c1 + 1), a)) {
        std::string_view head = loc.substr(0, c1);
        auto c2 = head.rfind(':');
        if (c2 != std::string_view::npos && parse_int(head.substr(c2 + 1), b)) {
          frame.file = std::string(head.substr(0, c2));
          frame.line = b;
        } else {
          frame.file = std::string(head);
          frame.line = a;
        }
      } else {
        frame.file = std::string(loc);
      }
    } else if (location.empty() && frame.function.empty()) {
      frame.function = "<unknown>";
    }
  }
  if (frame.function.empty()) frame.function = "<unknown>";
  return frame;
}

}  // namespace

CrashReport parse_sanitizer_report(std::string_view text) {
  auto lines = split_lines(text);
  std::size_t i = 0;
  std::optional<ErrorLine> err;
  for (; i < lines.size(); ++i) {
    err = match_error_line(lines[i]);
    if (err) break;
  }
  if (!err) throw Error(ErrorKind::NoCrashFound, "no sanitizer ERROR line");

  CrashReport report;
  report.crash_type = err->crash_type;
  report.logs = std::string(text);
  for (++i; i < lines.size(); ++i) {
    auto frame = match_frame(lines[i], err->sanitizer);
    if (frame) {
      report.stacktrace.push_back(std::move(*frame));
    } else if (!report.stacktrace.empty()) {
      break;
    }
  }
  if (report.stacktrace.empty()) {
    throw Error(ErrorKind::NoCrashFound, "sanitizer report for '" + report.crash_type +
                                             "' has no stack frames");
  }
  return report;
}

nlohmann::ordered_json to_json(const CrashReport& crash) {
  nlohmann::ordered_json j;
  j["crash_type"] = crash.crash_type;
  j["stacktrace"] = nlohmann::ordered_json::array();
  for (const auto& f : crash.stacktrace) {
    nlohmann::ordered_json fj;
    fj["function"] = f.function;
    fj["file"] = f.file;
    fj["line"] = f.line;
    fj["sanitizer_tag"] = f.sanitizer_tag;
    j["stacktrace"].push_back(std::move(fj));
  }
  j["logs"] = crash.logs;
  j["root_cause"] = crash.root_cause;
  if (crash.classification) {
    j["classification"] = std::string(to_string(*crash.classification));
  } else {
    j["classification"] = nullptr;
  }
  return j;
}

CrashReport crash_from_json(const nlohmann::ordered_json& j) {
  CrashReport c;
  try {
    c.crash_type = j.value("crash_type", "");
    for (const auto& f : j.at("stacktrace")) {
      StackFrame frame;
      frame.function = f.at("function").get<std::string>();
      frame.file = f.value("file", "");
      frame.line = f.value("line", 0);
      frame.sanitizer_tag = f.value("sanitizer_tag", "");
      c.stacktrace.push_back(std::move(frame));
    }
    c.logs = j.value("logs", "");
    c.root_cause = j.value("root_cause", "");
    if (j.contains("classification") && !j.at("classification").is_null()) {
      auto text = j.at("classification").get<std::string>();
      c.classification = parse_classification(text);
      if (!c.classification) {
        throw Error(ErrorKind::ParseError, "unknown classification '" + text + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("crash report: ") + e.what());
  }
  if (c.stacktrace.empty()) throw Error(ErrorKind::ParseError, "crash report has no frames");
  return c;
}

}  // namespace crashsift
