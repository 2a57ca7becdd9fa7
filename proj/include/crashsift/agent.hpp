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

// The generic agent loop. A model response that contains a
//   <tool name="code_search">grep -rn foo .</tool>
// directive is a tool call; anything else is a candidate final answer that
// must pass the agent's output parser.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace crashsift {

enum class TurnKind { ToolCall, ToolResult, ModelText };
enum class SessionOutcome { Completed, ToolBudgetExhausted, MalformedOutput };

std::string_view to_string(TurnKind kind);
std::string_view to_string(SessionOutcome outcome);
TurnKind parse_turn_kind(std::string_view text);
SessionOutcome parse_session_outcome(std::string_view text);

struct Turn {
  TurnKind kind;
  // ToolCall and ModelText hold the raw model response; ToolResult holds the
  // tool output exactly as fed back to the model.
  std::string payload;

  bool operator==(const Turn&) const = default;
};

struct TokenUsage {
  std::uint64_t input = 0;
  std::uint64_t tool = 0;
  std::uint64_t output = 0;

  std::uint64_t total() const { return input + tool + output; }
  TokenUsage& operator+=(const TokenUsage& o) {
    input += o.input;
    tool += o.tool;
    output += o.output;
    return *this;
  }
  bool operator==(const TokenUsage&) const = default;
};

struct AgentSpec {
  std::string name;
  std::string system_prompt;  // template with {{placeholder}} slots
  std::vector<std::string> tool_set;
  std::string output_parser;
  int max_tool_calls = 30;
  int max_reprompts = 2;
};

struct AgentSession {
  std::string agent;
  std::string resolved_prompt;
  // The bindings the template actually used, in placeholder order.
  std::vector<std::pair<std::string, std::string>> prompt_components;
  std::vector<Turn> turns;
  std::string final_output;
  TokenUsage token_usage;
  SessionOutcome outcome = SessionOutcome::MalformedOutput;
  // Last parser complaint when outcome is MalformedOutput.
  std::string error;

  bool completed() const { return outcome == SessionOutcome::Completed; }
  int tool_call_count() const;
};

// --- token accounting -----------------------------------------------------

using TokenCounter = std::function<std::uint64_t(std::string_view)>;

// ceil(bytes / 4).
std::uint64_t count_tokens(std::string_view text);

// input: resolved prompt; tool: ToolCall + ToolResult payloads; output:
// ModelText payloads + final_output.
TokenUsage record_usage(const AgentSession& session, const TokenCounter& counter = count_tokens);

// --- templates ------------------------------------------------------------

using Bindings = std::map<std::string, std::string, std::less<>>;

// Placeholder names in order of first appearance.
std::vector<std::string> placeholders(std::string_view tmpl);

// Throws UnboundPlaceholder naming every unbound slot. Extra bindings are
// ignored.
std::string render_template(std::string_view tmpl, const Bindings& bindings);

// --- backends and tools ---------------------------------------------------

enum class BackendKind { Live, Scripted, Replay };

struct Message {
  enum class Role { User, Assistant };
  Role role;
  std::string text;
};

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  virtual BackendKind kind() const = 0;
  // Throws BackendUnavailable when no response can be produced.
  virtual std::string complete(const std::vector<Message>& conversation) = 0;
};

struct ToolDirective {
  std::string name;
  std::string args;
};

// First well-formed directive in `text`, if any.
std::optional<ToolDirective> find_tool_directive(std::string_view text);

class ToolRunner {
 public:
  virtual ~ToolRunner() = default;
  // Tool failures are reported in the returned text so the model can recover.
  virtual std::string run(const ToolDirective& call) = 0;
  // True for runners that feed back recorded results: they must see every
  // call, including ones the agent's tool set rejects, to stay aligned.
  virtual bool replays_recorded() const { return false; }
};

// Throws MalformedOutput with a human-readable reason.
using OutputValidator = std::function<void(std::string_view)>;

// Looks up a parser id registered by the analyzers ("constraint_report",
// "feasibility", "fuzz_driver", "crash_analysis", "coverage_analysis",
// "any").
OutputValidator output_validator(std::string_view parser_id);

struct RunLimits {
  std::optional<int> max_tool_calls;
  std::optional<int> max_reprompts;
};

// Fixed reprompt text appended after a parser rejection.
std::string reprompt_message(std::string_view parser_error);

AgentSession run_agent(const AgentSpec& spec, const Bindings& bindings, LlmBackend& backend,
                       ToolRunner& tools, const RunLimits& limits = {});

// Throws ToolBudgetExhausted / MalformedOutput for non-completed sessions.
void require_completed(const AgentSession& session);

}  // namespace crashsift
