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

// YAML loading for benchmark sets and run configurations.

#include <algorithm>
#include <cctype>

#include <yaml-cpp/yaml.h>

#include "crashsift/error.hpp"
#include "crashsift/pipeline.hpp"
#include "crashsift/util.hpp"

namespace fs = std::filesystem;

namespace crashsift {
namespace {

[[noreturn]] void bad(const fs::path& file, const std::string& why) {
  throw Error(ErrorKind::InvalidConfig, file.string() + ": " + why);
}

std::string required(const YAML::Node& node, const char* key, const fs::path& file) {
  if (!node[key] || !node[key].IsScalar()) bad(file, std::string("missing '") + key + "'");
  std::string v = node[key].as<std::string>();
  if (trim(v).empty()) bad(file, std::string("empty '") + key + "'");
  return v;
}

fs::path resolve_against(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

std::string slug(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!out.empty() && out.back() != '-') {
      out.push_back('-');
    }
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out;
}

YAML::Node load_yaml_file(const fs::path& path) {
  try {
    return YAML::LoadFile(path.string());
  } catch (const YAML::BadFile&) {
    throw Error(ErrorKind::IOFailure, "cannot read " + path.string());
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
}

}  // namespace

std::vector<BenchmarkSpec> load_benchmarks(const fs::path& path) {
  std::vector<YAML::Node> docs;
  try {
    docs = YAML::LoadAllFromFile(path.string());
  } catch (const YAML::BadFile&) {
    throw Error(ErrorKind::IOFailure, "cannot read " + path.string());
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
  const fs::path base = path.parent_path();
  std::vector<BenchmarkSpec> out;
  try {
    for (const auto& doc : docs) {
      if (!doc || doc.IsNull()) continue;
      if (!doc.IsMap()) bad(path, "each document must be a mapping");
      BenchmarkSpec spec;
      auto& fn = spec.function;
      fn.project_name = required(doc, "project", path);
      fn.function_signature = required(doc, "function_signature", path);
      fn.function_name = function_name_from_signature(fn.function_signature);
      if (fn.function_name.empty()) bad(path, "cannot find a function name in the signature");
      fn.id = doc["id"] ? doc["id"].as<std::string>() : slug(fn.project_name + "-" + fn.function_name);

      std::string source_path = required(doc, "source_path", path);
      auto colon = source_path.rfind(':');
      if (colon != std::string::npos && colon + 1 < source_path.size() &&
          std::all_of(source_path.begin() + static_cast<long>(colon) + 1, source_path.end(),
                      [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        fn.source_line = std::stoi(source_path.substr(colon + 1));
        source_path.resize(colon);
      }
      fn.source_file = fs::path(source_path).lexically_normal().generic_string();

      spec.language = parse_language(doc["language"] ? doc["language"].as<std::string>() : "c");
      spec.project_dir = resolve_against(base, required(doc, "project_dir", path));

      const auto ex = doc["executor"];
      if (!ex || !ex.IsMap()) bad(path, fn.id + ": missing 'executor' mapping");
      if (ex["simproject"]) {
        spec.executor.kind = ExecutorConfig::Kind::Simulated;
        spec.executor.simproject = resolve_against(base, ex["simproject"].as<std::string>());
      } else {
        spec.executor.kind = ExecutorConfig::Kind::External;
        spec.executor.external.build_cmd = required(ex, "build_cmd", path);
        spec.executor.external.fuzz_cmd = required(ex, "fuzz_cmd", path);
        if (ex["coverage_file"]) spec.executor.external.coverage_file = ex["coverage_file"].as<std::string>();
        if (ex["grace_s"]) spec.executor.external.grace = std::chrono::seconds(ex["grace_s"].as<int>());
      }
      out.push_back(std::move(spec));
    }
  } catch (const YAML::Exception& e) {
    bad(path, e.what());
  }
  if (out.empty()) bad(path, "no benchmarks");
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (std::size_t j = i + 1; j < out.size(); ++j) {
      if (out[i].function.id == out[j].function.id) bad(path, "duplicate benchmark id " + out[i].function.id);
    }
  }
  return out;
}

RunConfig load_run_config(const fs::path& path) {
  const YAML::Node doc = load_yaml_file(path);
  if (!doc.IsMap()) bad(path, "expected a mapping");
  const fs::path base = path.parent_path();
  RunConfig c;
  try {
    c.benchmarks_file = resolve_against(base, required(doc, "benchmarks", path));
    if (const auto b = doc["backend"]) {
      if (b["scripted"]) c.scripted_dir = resolve_against(base, b["scripted"].as<std::string>());
      if (const auto live = b["live"]) {
        LiveBackendConfig lc;
        lc.endpoint = required(live, "endpoint", path);
        lc.model = required(live, "model", path);
        if (live["api_key_env"]) lc.api_key_env = live["api_key_env"].as<std::string>();
        if (live["timeout_s"]) lc.timeout = std::chrono::seconds(live["timeout_s"].as<int>());
        if (live["temperature"]) lc.temperature = live["temperature"].as<double>();
        c.live = lc;
      }
    }
    if (doc["constraints"]) c.constraints_enabled = doc["constraints"].as<bool>();
    if (doc["validator"]) c.validator_enabled = doc["validator"].as<bool>();
    if (doc["n_trials"]) c.n_trials = doc["n_trials"].as<int>();
    if (doc["max_cycles"]) c.max_cycles = doc["max_cycles"].as<int>();
    if (doc["fuzz_duration_s"]) c.fuzz_duration_s = doc["fuzz_duration_s"].as<double>();
    if (doc["prices"]) c.prices_file = resolve_against(base, doc["prices"].as<std::string>());
    if (doc["output_dir"]) c.output_dir = resolve_against(base, doc["output_dir"].as<std::string>());
    if (doc["parallel"]) c.parallel = doc["parallel"].as<int>();
    if (doc["writer_retries"]) c.writer_retries = doc["writer_retries"].as<int>();
    if (doc["plateau_window"]) c.plateau_window = doc["plateau_window"].as<int>();
    if (doc["plateau_epsilon"]) c.plateau_epsilon = doc["plateau_epsilon"].as<double>();
    if (doc["max_tool_calls"]) c.limits.max_tool_calls = doc["max_tool_calls"].as<int>();
    if (doc["max_reprompts"]) c.limits.max_reprompts = doc["max_reprompts"].as<int>();
  } catch (const YAML::Exception& e) {
    bad(path, e.what());
  }
  validate(c);
  return c;
}

void validate(const RunConfig& c) {
  if (c.scripted_dir.has_value() == c.live.has_value()) {
    throw Error(ErrorKind::InvalidConfig, "exactly one backend (scripted or live) must be configured");
  }
  if (c.n_trials < 1) throw Error(ErrorKind::InvalidConfig, "n_trials must be >= 1");
  if (c.max_cycles < 1) throw Error(ErrorKind::InvalidConfig, "max_cycles must be >= 1");
  if (c.parallel < 1) throw Error(ErrorKind::InvalidConfig, "parallel must be >= 1");
  if (c.writer_retries < 0) throw Error(ErrorKind::InvalidConfig, "writer_retries must be >= 0");
  if (c.plateau_window < 2) throw Error(ErrorKind::InvalidConfig, "plateau_window must be >= 2");
  if (!(c.fuzz_duration_s > 0)) throw Error(ErrorKind::InvalidConfig, "fuzz_duration_s must be > 0");
}

}  // namespace crashsift
