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

// On-disk form of one agent session. The same file drives the scripted and
// replay backends.
//
//   {"meta": {"agent", "benchmark_id", "trial_id", "cycle", "timestamp"},
//    "prompt_components": {tag: text, ...},
//    "turns": [{"kind", "payload"}, ...],
//    "final_output": "...",
//    "outcome": "Completed" | "ToolBudgetExhausted" | "MalformedOutput"}

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "crashsift/agent.hpp"

namespace crashsift {

struct BundleMeta {
  std::string agent;
  std::string benchmark_id;
  std::string trial_id;
  int cycle = 0;
  std::string timestamp;

  bool operator==(const BundleMeta&) const = default;
};

// Ordered tag -> text pairs, first occurrence wins.
using PromptComponents = std::vector<std::pair<std::string, std::string>>;

Bindings to_bindings(const PromptComponents& components);

struct SessionBundle {
  BundleMeta meta;
  PromptComponents prompt_components;
  std::vector<Turn> turns;
  std::string final_output;
  SessionOutcome outcome = SessionOutcome::Completed;

  bool operator==(const SessionBundle&) const = default;

  // The model-authored responses in order: every ToolCall/ModelText payload,
  // then final_output when the session completed.
  std::vector<std::string> model_responses() const;
  // Recorded ToolResult payloads in order.
  std::vector<std::string> tool_results() const;
};

nlohmann::ordered_json to_json(const SessionBundle& bundle);
SessionBundle bundle_from_json(const nlohmann::ordered_json& j);

std::string serialize_bundle(const SessionBundle& bundle);
void save_bundle(const SessionBundle& bundle, const std::filesystem::path& path);
SessionBundle load_bundle(const std::filesystem::path& path);

// "<agent>.bundle.json"; retries of the same agent within one cycle get
// "<agent>.attempt<k>.bundle.json".
std::string bundle_file_name(std::string_view agent, int attempt = 1);
// <benchmark>/<trial>/<cycle>/<agent>.bundle.json
std::filesystem::path bundle_relative_path(const BundleMeta& meta, int attempt = 1);

}  // namespace crashsift
