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

#include "crashsift/executor.hpp"

#include <cmath>
#include <regex>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "crashsift/error.hpp"
#include "crashsift/process.hpp"
#include "crashsift/util.hpp"

namespace fs = std::filesystem;

namespace crashsift {
namespace {

[[noreturn]] void bad_config(const std::string& why) {
  throw Error(ErrorKind::InvalidConfig, "simproject: " + why);
}

bool rule_matches(const SimRule& rule, const std::string& source) {
  switch (rule.match) {
    case SimRule::Match::Default: return true;
    case SimRule::Match::Contains: return source.find(rule.pattern) != std::string::npos;
    case SimRule::Match::Regex: return std::regex_search(source, std::regex(rule.pattern));
  }
  return false;
}

std::string tail(const std::string& s, std::size_t n) {
  return s.size() <= n ? s : "..." + s.substr(s.size() - n);
}

}  // namespace

double parse_coverage_summary(std::string_view text) {
  std::string_view s = trim(text);
  bool percent = false;
  if (!s.empty() && s.back() == '%') {
    percent = true;
    s = trim(s.substr(0, s.size() - 1));
  }
  double v = 0;
  try {
    std::size_t used = 0;
    v = std::stod(std::string(s), &used);
    if (used != s.size()) throw std::invalid_argument("trailing text");
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError, "coverage summary is not a number: '" + std::string(s) + "'");
  }
  if (percent) v /= 100.0;
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
    throw Error(ErrorKind::ParseError, "coverage outside [0, 1]: " + std::string(text));
  }
  return v;
}

SimulatedProject SimulatedProject::from_yaml(std::string_view yaml_text, const fs::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::ParseError, std::string("simproject: ") + e.what());
  }
  if (!root["rules"] || !root["rules"].IsSequence()) bad_config("missing 'rules' list");

  SimulatedProject project;
  bool has_default = false;
  try {
    for (const auto& node : root["rules"]) {
      SimRule rule;
      const auto match = node["match"];
      if (!match) bad_config("rule without 'match'");
      if (match.IsScalar() && match.as<std::string>() == "default") {
        rule.match = SimRule::Match::Default;
      } else if (match.IsMap() && match["contains"]) {
        rule.match = SimRule::Match::Contains;
        rule.pattern = match["contains"].as<std::string>();
      } else if (match.IsMap() && match["regex"]) {
        rule.match = SimRule::Match::Regex;
        rule.pattern = match["regex"].as<std::string>();
        try {
          std::regex check(rule.pattern);
        } catch (const std::regex_error& e) {
          bad_config("bad regex '" + rule.pattern + "': " + e.what());
        }
      } else {
        bad_config("match must be 'default', {contains: ...} or {regex: ...}");
      }
      has_default = has_default || rule.match == SimRule::Match::Default;

      const auto outcome = node["outcome"];
      if (!outcome || !outcome.IsMap()) bad_config("rule without an 'outcome' map");
      rule.built = outcome["built"] ? outcome["built"].as<bool>() : true;
      rule.crashed = outcome["crashed"] ? outcome["crashed"].as<bool>() : false;
      rule.coverage = outcome["coverage"] ? outcome["coverage"].as<double>() : 0.0;
      if (!(rule.coverage >= 0.0 && rule.coverage <= 1.0)) bad_config("coverage outside [0, 1]");
      if (rule.crashed) {
        std::string log;
        if (outcome["sanitizer_log"]) {
          log = outcome["sanitizer_log"].as<std::string>();
        } else if (outcome["sanitizer_log_file"]) {
          fs::path p = outcome["sanitizer_log_file"].as<std::string>();
          log = read_file(p.is_absolute() ? p : base_dir / p);
        } else {
          bad_config("crashing rule needs sanitizer_log or sanitizer_log_file");
        }
        rule.crash = parse_sanitizer_report(log);
      }
      project.rules.push_back(std::move(rule));
    }
  } catch (const YAML::Exception& e) {
    bad_config(e.what());
  }
  if (!has_default) bad_config("no default rule");
  return project;
}

SimulatedProject SimulatedProject::load(const fs::path& path) {
  return from_yaml(read_file(path), path.parent_path());
}

ExecutionResult execute_driver(const FuzzDriver& driver, const SimulatedProject& project,
                               double duration_s) {
  if (trim(driver.source).empty()) throw Error(ErrorKind::BuildFailure, "empty driver source");
  for (const auto& rule : project.rules) {
    if (!rule_matches(rule, driver.source)) continue;
    if (!rule.built) throw Error(ErrorKind::BuildFailure, "simulated build failure");
    ExecutionResult r;
    r.built = true;
    r.crashed = rule.crashed;
    r.crash = rule.crash;
    r.coverage = rule.coverage;
    r.duration_s = duration_s;
    return r;
  }
  throw Error(ErrorKind::InvalidConfig, "simproject: no rule matched");
}

ExecutionResult execute_driver(const FuzzDriver& driver, const ExternalBuild& build,
                               const fs::path& workdir, double duration_s) {
  if (trim(driver.source).empty()) throw Error(ErrorKind::BuildFailure, "empty driver source");
  fs::create_directories(workdir);
  const fs::path source = fs::absolute(workdir / "fuzz_driver.cc");
  write_file_atomic(source, driver.source);

  std::ostringstream dur;
  dur << duration_s;
  ProcessOptions opts;
  opts.working_dir = workdir;
  opts.output_cap = 256 * 1024;
  opts.extra_env = {{"DRIVER_SOURCE", source.string()},
                    {"WORKDIR", fs::absolute(workdir).string()},
                    {"FUZZ_DURATION_S", dur.str()}};

  opts.timeout = build.build_timeout;
  auto built = run_process({"sh", "-c", build.build_cmd}, opts);
  if (built.timed_out || built.exit_status != 0) {
    throw Error(ErrorKind::BuildFailure,
                (built.timed_out ? "build timed out\n" : "build exited with " +
                                                             std::to_string(built.exit_status) +
                                                             "\n") +
                    tail(built.stderr_text + built.stdout_text, 4000));
  }

  const auto start = std::chrono::steady_clock::now();
  opts.timeout = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::duration<double>(duration_s)) +
                 build.grace;
  auto fuzz = run_process({"sh", "-c", build.fuzz_cmd}, opts);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (fuzz.timed_out) {
    throw Error(ErrorKind::ExecutorTimeout,
                "fuzz command exceeded " + dur.str() + "s plus grace");
  }

  ExecutionResult r;
  r.built = true;
  r.duration_s = elapsed;
  try {
    r.crash = parse_sanitizer_report(fuzz.stderr_text + "\n" + fuzz.stdout_text);
    r.crashed = true;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoCrashFound) throw;
  }
  if (!build.coverage_file.empty()) {
    const fs::path cov = workdir / build.coverage_file;
    if (fs::exists(cov)) r.coverage = parse_coverage_summary(read_file(cov));
  }
  return r;
}

}  // namespace crashsift
