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

#include "crashsift/replay.hpp"

#include <algorithm>
#include <set>

#include "crashsift/agents.hpp"
#include "crashsift/backends.hpp"
#include "crashsift/error.hpp"
#include "crashsift/tags.hpp"
#include "crashsift/util.hpp"

namespace crashsift {

SessionBundle make_bundle(const AgentSession& session, BundleMeta meta) {
  SessionBundle b;
  meta.agent = session.agent;
  if (meta.timestamp.empty()) meta.timestamp = utc_timestamp_now();
  b.meta = std::move(meta);
  b.prompt_components = session.prompt_components;
  b.turns = session.turns;
  b.final_output = session.final_output;
  b.outcome = session.outcome;
  return b;
}

SessionBundle capture_session(const AgentSession& session, BundleMeta meta,
                              const std::filesystem::path& dest) {
  SessionBundle b = make_bundle(session, std::move(meta));
  save_bundle(b, dest);
  return b;
}

PromptComponents extract_context(std::string_view log_text) {
  PromptComponents out;
  std::set<std::string> seen;
  for (auto& [tag, body] : top_level_sections(log_text)) {
    if (seen.insert(tag).second) out.emplace_back(std::move(tag), std::move(body));
  }
  return out;
}

std::string_view base_agent_name(std::string_view name) {
  if (name.size() > kSimpleSuffix.size() &&
      name.substr(name.size() - kSimpleSuffix.size()) == kSimpleSuffix) {
    name.remove_suffix(kSimpleSuffix.size());
  }
  return name;
}

std::string reconstruct_prompt(const SessionBundle& bundle, const AgentSpec& spec) {
  return render_template(spec.system_prompt, to_bindings(bundle.prompt_components));
}

RunLimits recorded_limits(const SessionBundle& bundle) {
  RunLimits limits;
  const auto calls = std::count_if(bundle.turns.begin(), bundle.turns.end(),
                                   [](const Turn& t) { return t.kind == TurnKind::ToolCall; });
  const auto texts = std::count_if(bundle.turns.begin(), bundle.turns.end(),
                                   [](const Turn& t) { return t.kind == TurnKind::ModelText; });
  if (bundle.outcome == SessionOutcome::ToolBudgetExhausted) {
    limits.max_tool_calls = std::max<int>(1, static_cast<int>(calls));
    // The over-budget request is the last ModelText; the others were rejections.
    limits.max_reprompts = static_cast<int>(texts);
  } else if (bundle.outcome == SessionOutcome::MalformedOutput) {
    limits.max_tool_calls = static_cast<int>(calls) + 1;
    limits.max_reprompts = std::max<int>(0, static_cast<int>(texts) - 1);
  } else {
    limits.max_tool_calls = static_cast<int>(calls) + 1;
    limits.max_reprompts = static_cast<int>(texts);
  }
  return limits;
}

AgentSession replay_agent(const SessionBundle& bundle, const AgentSpec& spec, LlmBackend& backend,
                          ToolRunner* live_tools, const RunLimits& limits) {
  if (base_agent_name(bundle.meta.agent) != base_agent_name(spec.name)) {
    throw Error(ErrorKind::SpecMismatch,
                "bundle of '" + bundle.meta.agent + "' cannot be replayed as '" + spec.name + "'");
  }
  const Bindings bindings = to_bindings(bundle.prompt_components);
  if (backend.kind() == BackendKind::Replay) {
    RecordedToolRunner recorded(bundle.tool_results());
    RunLimits effective = recorded_limits(bundle);
    if (limits.max_tool_calls) effective.max_tool_calls = limits.max_tool_calls;
    if (limits.max_reprompts) effective.max_reprompts = limits.max_reprompts;
    return run_agent(spec, bindings, backend, recorded, effective);
  }
  if (live_tools == nullptr) {
    throw Error(ErrorKind::InvalidConfig, "a fresh replay needs a tool runner");
  }
  return run_agent(spec, bindings, backend, *live_tools, limits);
}

}  // namespace crashsift
