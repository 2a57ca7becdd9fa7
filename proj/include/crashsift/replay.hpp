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

// Capture-and-replay: persist agent sessions and re-run one agent in
// isolation from its recorded context.

#pragma once

#include <filesystem>
#include <string_view>

#include "crashsift/agent.hpp"
#include "crashsift/bundle.hpp"

namespace crashsift {

SessionBundle make_bundle(const AgentSession& session, BundleMeta meta);

// Writes the bundle atomically; meta.agent is taken from the session and an
// empty timestamp is filled with the current time. Throws IOFailure.
SessionBundle capture_session(const AgentSession& session, BundleMeta meta,
                              const std::filesystem::path& dest);

// Top-level <tag>body</tag> pairs in order; a repeated tag keeps its first
// body. Throws UnbalancedTags.
PromptComponents extract_context(std::string_view log_text);

// "crash-validator-simple" -> "crash-validator".
std::string_view base_agent_name(std::string_view name);

// The agent's template rendered with the recorded components.
std::string reconstruct_prompt(const SessionBundle& bundle, const AgentSpec& spec);

// Re-runs `spec` from the bundle's context. With a Replay backend the
// recorded tool results are fed back and the recorded limits are reused, so
// the session reproduces the capture exactly; otherwise `live_tools` serve
// tool calls. Throws SpecMismatch when the bundle belongs to another agent
// (prompt variants of the same agent are accepted) and ExhaustedScript when a
// replay asks for more than was recorded.
AgentSession replay_agent(const SessionBundle& bundle, const AgentSpec& spec, LlmBackend& backend,
                          ToolRunner* live_tools = nullptr, const RunLimits& limits = {});

// Limits that make a Replay run stop where the capture stopped.
RunLimits recorded_limits(const SessionBundle& bundle);

}  // namespace crashsift
