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

#include "crashsift/agent.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include "crashsift/error.hpp"
#include "crashsift/util.hpp"

namespace crashsift {

std::string_view to_string(TurnKind kind) {
  switch (kind) {
    case TurnKind::ToolCall: return "ToolCall";
    case TurnKind::ToolResult: return "ToolResult";
    case TurnKind::ModelText: return "ModelText";
  }
  return "ModelText";
}

std::string_view to_string(SessionOutcome outcome) {
  switch (outcome) {
    case SessionOutcome::Completed: return "Completed";
    case SessionOutcome::ToolBudgetExhausted: return "ToolBudgetExhausted";
    case SessionOutcome::MalformedOutput: return "MalformedOutput";
  }
  return "MalformedOutput";
}

TurnKind parse_turn_kind(std::string_view text) {
  if (text == "ToolCall") return TurnKind::ToolCall;
  if (text == "ToolResult") return TurnKind::ToolResult;
  if (text == "ModelText") return TurnKind::ModelText;
  throw Error(ErrorKind::ParseError, "unknown turn kind '" + std::string(text) + "'");
}

SessionOutcome parse_session_outcome(std::string_view text) {
  if (text == "Completed") return SessionOutcome::Completed;
  if (text == "ToolBudgetExhausted") return SessionOutcome::ToolBudgetExhausted;
  if (text == "MalformedOutput") return SessionOutcome::MalformedOutput;
  throw Error(ErrorKind::ParseError, "unknown session outcome '" + std::string(text) + "'");
}

int AgentSession::tool_call_count() const {
  return static_cast<int>(std::count_if(turns.begin(), turns.end(),
                                        [](const Turn& t) { return t.kind == TurnKind::ToolCall; }));
}

std::uint64_t count_tokens(std::string_view text) { return (text.size() + 3) / 4; }

TokenUsage record_usage(const AgentSession& session, const TokenCounter& counter) {
  TokenUsage usage;
  usage.input = counter(session.resolved_prompt);
  for (const auto& t : session.turns) {
    if (t.kind == TurnKind::ModelText) {
      usage.output += counter(t.payload);
    } else {
      usage.tool += counter(t.payload);
    }
  }
  usage.output += counter(session.final_output);
  return usage;
}

namespace {

const std::regex& placeholder_re() {
  static const std::regex re(R"(\{\{\s*([A-Za-z_][A-Za-z0-9_]*)\s*\}\})");
  return re;
}

}  // namespace

std::vector<std::string> placeholders(std::string_view tmpl) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  std::string s(tmpl);
  for (std::sregex_iterator it(s.begin(), s.end(), placeholder_re()), end; it != end; ++it) {
    std::string name = (*it)[1];
    if (seen.insert(name).second) out.push_back(name);
  }
  return out;
}

std::string render_template(std::string_view tmpl, const Bindings& bindings) {
  std::string s(tmpl);
  std::string out;
  std::vector<std::string> missing;
  std::size_t last = 0;
  for (std::sregex_iterator it(s.begin(), s.end(), placeholder_re()), end; it != end; ++it) {
    const auto& m = *it;
    out.append(s, last, static_cast<std::size_t>(m.position(0)) - last);
    auto found = bindings.find(m[1].str());
    if (found == bindings.end()) {
      if (std::find(missing.begin(), missing.end(), m[1].str()) == missing.end()) {
        missing.push_back(m[1].str());
      }
    } else {
      out += found->second;
    }
    last = static_cast<std::size_t>(m.position(0) + m.length(0));
  }
  out.append(s, last);
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw Error(ErrorKind::UnboundPlaceholder, "unbound placeholders: " + list);
  }
  return out;
}

std::optional<ToolDirective> find_tool_directive(std::string_view text) {
  auto skip_ws = [&](std::size_t i) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    return i;
  };
  for (std::size_t at = text.find("<tool"); at != std::string_view::npos;
       at = text.find("<tool", at + 1)) {
    std::size_t i = at + 5;
    if (i >= text.size() || !std::isspace(static_cast<unsigned char>(text[i]))) continue;
    i = skip_ws(i);
    if (text.compare(i, 4, "name") != 0) continue;
    i = skip_ws(i + 4);
    if (i >= text.size() || text[i] != '=') continue;
    i = skip_ws(i + 1);
    if (i >= text.size() || text[i] != '"') continue;
    std::size_t q = text.find('"', i + 1);
    if (q == std::string_view::npos || q == i + 1) continue;
    std::string_view name = text.substr(i + 1, q - i - 1);
    i = skip_ws(q + 1);
    if (i >= text.size() || text[i] != '>') continue;
    std::size_t close = text.find("</tool>", i + 1);
    if (close == std::string_view::npos) continue;
    return ToolDirective{std::string(name), std::string(trim(text.substr(i + 1, close - i - 1)))};
  }
  return std::nullopt;
}

std::string reprompt_message(std::string_view parser_error) {
  return "Your previous response could not be parsed: " + std::string(parser_error) +
         "\nReply again with the complete answer in the required output format, or issue a "
         "tool call.";
}

AgentSession run_agent(const AgentSpec& spec, const Bindings& bindings, LlmBackend& backend,
                       ToolRunner& tools, const RunLimits& limits) {
  const int max_tool_calls = limits.max_tool_calls.value_or(spec.max_tool_calls);
  const int max_reprompts = limits.max_reprompts.value_or(spec.max_reprompts);
  if (max_tool_calls < 1) {
    throw Error(ErrorKind::InvalidConfig, spec.name + ": max_tool_calls must be >= 1");
  }
  OutputValidator validate = output_validator(spec.output_parser);

  AgentSession session;
  session.agent = spec.name;
  session.resolved_prompt = render_template(spec.system_prompt, bindings);
  for (const auto& name : placeholders(spec.system_prompt)) {
    session.prompt_components.emplace_back(name, bindings.find(name)->second);
  }

  std::vector<Message> conversation{{Message::Role::User, session.resolved_prompt}};
  int tool_calls = 0;
  int reprompts = 0;
  for (;;) {
    std::string response = backend.complete(conversation);
    conversation.push_back({Message::Role::Assistant, response});

    if (auto call = find_tool_directive(response)) {
      if (tool_calls >= max_tool_calls) {
        session.turns.push_back({TurnKind::ModelText, std::move(response)});
        session.outcome = SessionOutcome::ToolBudgetExhausted;
        break;
      }
      std::string result;
      if (!tools.replays_recorded() &&
          std::find(spec.tool_set.begin(), spec.tool_set.end(), call->name) == spec.tool_set.end()) {
        result = "error: tool '" + call->name + "' is not available to this agent";
      } else {
        result = tools.run(*call);
      }
      ++tool_calls;
      session.turns.push_back({TurnKind::ToolCall, std::move(response)});
      session.turns.push_back({TurnKind::ToolResult, result});
      conversation.push_back({Message::Role::User, "<tool_result name=\"" + call->name + "\">\n" +
                                                       result + "\n</tool_result>"});
      continue;
    }

    try {
      validate(response);
      session.final_output = std::move(response);
      session.outcome = SessionOutcome::Completed;
      break;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::MalformedOutput) throw;
      session.error = e.what();
      session.turns.push_back({TurnKind::ModelText, std::move(response)});
      if (reprompts >= max_reprompts) {
        session.outcome = SessionOutcome::MalformedOutput;
        break;
      }
      ++reprompts;
      conversation.push_back({Message::Role::User, reprompt_message(e.what())});
    }
  }
  session.token_usage = record_usage(session);
  return session;
}

void require_completed(const AgentSession& session) {
  switch (session.outcome) {
    case SessionOutcome::Completed:
      return;
    case SessionOutcome::ToolBudgetExhausted:
      throw Error(ErrorKind::ToolBudgetExhausted, session.agent + " exceeded its tool budget");
    case SessionOutcome::MalformedOutput:
      throw Error(ErrorKind::MalformedOutput, session.agent + ": " + session.error);
  }
}

}  // namespace crashsift
