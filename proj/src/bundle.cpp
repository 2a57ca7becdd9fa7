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

#include "crashsift/bundle.hpp"

#include "crashsift/error.hpp"
#include "crashsift/util.hpp"

namespace fs = std::filesystem;

namespace crashsift {

Bindings to_bindings(const PromptComponents& components) {
  Bindings b;
  for (const auto& [tag, text] : components) b.emplace(tag, text);
  return b;
}

std::vector<std::string> SessionBundle::model_responses() const {
  std::vector<std::string> out;
  for (const auto& t : turns) {
    if (t.kind != TurnKind::ToolResult) out.push_back(t.payload);
  }
  if (outcome == SessionOutcome::Completed) out.push_back(final_output);
  return out;
}

std::vector<std::string> SessionBundle::tool_results() const {
  std::vector<std::string> out;
  for (const auto& t : turns) {
    if (t.kind == TurnKind::ToolResult) out.push_back(t.payload);
  }
  return out;
}

nlohmann::ordered_json to_json(const SessionBundle& bundle) {
  nlohmann::ordered_json j;
  j["meta"]["agent"] = bundle.meta.agent;
  j["meta"]["benchmark_id"] = bundle.meta.benchmark_id;
  j["meta"]["trial_id"] = bundle.meta.trial_id;
  j["meta"]["cycle"] = bundle.meta.cycle;
  j["meta"]["timestamp"] = bundle.meta.timestamp;
  j["prompt_components"] = nlohmann::ordered_json::object();
  for (const auto& [tag, text] : bundle.prompt_components) j["prompt_components"][tag] = text;
  j["turns"] = nlohmann::ordered_json::array();
  for (const auto& t : bundle.turns) {
    nlohmann::ordered_json tj;
    tj["kind"] = std::string(to_string(t.kind));
    tj["payload"] = t.payload;
    j["turns"].push_back(std::move(tj));
  }
  j["final_output"] = bundle.final_output;
  j["outcome"] = std::string(to_string(bundle.outcome));
  return j;
}

SessionBundle bundle_from_json(const nlohmann::ordered_json& j) {
  SessionBundle b;
  try {
    const auto& m = j.at("meta");
    b.meta.agent = m.at("agent").get<std::string>();
    b.meta.benchmark_id = m.value("benchmark_id", "");
    b.meta.trial_id = m.value("trial_id", "");
    b.meta.cycle = m.value("cycle", 0);
    b.meta.timestamp = m.value("timestamp", "");
    if (j.contains("prompt_components")) {
      for (const auto& [tag, text] : j.at("prompt_components").items()) {
        b.prompt_components.emplace_back(tag, text.get<std::string>());
      }
    }
    for (const auto& t : j.at("turns")) {
      b.turns.push_back({parse_turn_kind(t.at("kind").get<std::string>()),
                         t.at("payload").get<std::string>()});
    }
    b.final_output = j.value("final_output", "");
    b.outcome = parse_session_outcome(j.value("outcome", "Completed"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("bundle: ") + e.what());
  }
  return b;
}

std::string serialize_bundle(const SessionBundle& bundle) { return to_json(bundle).dump(2) + "\n"; }

void save_bundle(const SessionBundle& bundle, const fs::path& path) {
  write_file_atomic(path, serialize_bundle(bundle));
}

SessionBundle load_bundle(const fs::path& path) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
  return bundle_from_json(j);
}

std::string bundle_file_name(std::string_view agent, int attempt) {
  std::string name(agent);
  if (attempt > 1) name += ".attempt" + std::to_string(attempt);
  return name + ".bundle.json";
}

fs::path bundle_relative_path(const BundleMeta& meta, int attempt) {
  return fs::path(meta.benchmark_id) / meta.trial_id / std::to_string(meta.cycle) /
         bundle_file_name(meta.agent, attempt);
}

}  // namespace crashsift
