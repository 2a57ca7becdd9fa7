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

#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "crashsift/agent.hpp"
#include "crashsift/bundle.hpp"

namespace crashsift {

// Re-emits the model responses recorded in a bundle, one per call, ignoring
// the conversation. Scripted and Replay differ only in how the caller treats
// tools: Scripted runs them live, Replay feeds recorded results back.
class ScriptedBackend : public LlmBackend {
 public:
  explicit ScriptedBackend(std::vector<std::string> responses,
                           BackendKind kind = BackendKind::Scripted);
  static ScriptedBackend from_bundle(const SessionBundle& bundle,
                                     BackendKind kind = BackendKind::Scripted);

  BackendKind kind() const override { return kind_; }
  // Throws ExhaustedScript once every response has been used.
  std::string complete(const std::vector<Message>& conversation) override;

  std::size_t remaining() const { return responses_.size() - next_; }

 private:
  std::vector<std::string> responses_;
  std::size_t next_ = 0;
  BackendKind kind_;
};

// Feeds recorded ToolResult payloads back in order.
class RecordedToolRunner : public ToolRunner {
 public:
  explicit RecordedToolRunner(std::vector<std::string> results) : results_(std::move(results)) {}
  std::string run(const ToolDirective& call) override;
  bool replays_recorded() const override { return true; }

 private:
  std::vector<std::string> results_;
  std::size_t next_ = 0;
};

struct LiveBackendConfig {
  // OpenAI-compatible chat completions URL, e.g.
  // https://api.example.com/v1/chat/completions
  std::string endpoint;
  std::string model;
  // Name of the environment variable holding the bearer token.
  std::string api_key_env = "CRASHSIFT_API_KEY";
  std::chrono::seconds timeout{120};
  double temperature = 0.0;
  // One retry on BackendUnavailable.
  int retries = 1;
};

class LiveBackend : public LlmBackend {
 public:
  explicit LiveBackend(LiveBackendConfig config);
  BackendKind kind() const override { return BackendKind::Live; }
  std::string complete(const std::vector<Message>& conversation) override;

 private:
  std::string request_once(const std::vector<Message>& conversation);

  LiveBackendConfig config_;
  // Requests are serialized so one instance can be shared across sessions.
  std::mutex mu_;
};

// Where per-session backends come from when the pipeline starts an agent.
struct SessionKey {
  std::string benchmark_id;
  std::string trial_id;
  int cycle = 0;
  std::string agent;
  int attempt = 1;  // writer retries within one cycle
};

class BackendProvider {
 public:
  virtual ~BackendProvider() = default;
  virtual std::unique_ptr<LlmBackend> backend_for(const SessionKey& key) = 0;
};

// Looks up bundles under a script directory, most specific first:
//   <dir>/<benchmark>/<trial>/<cycle>/<agent>.bundle.json
//   <dir>/<benchmark>/<trial>/<agent>.bundle.json
//   <dir>/<benchmark>/<cycle>/<agent>.bundle.json
//   <dir>/<benchmark>/<agent>.bundle.json
//   <dir>/<agent>.bundle.json
// For attempt k > 1, "<agent>.attempt<k>.bundle.json" is preferred at each
// level. Throws ExhaustedScript when none exists.
class ScriptDirectoryProvider : public BackendProvider {
 public:
  explicit ScriptDirectoryProvider(std::filesystem::path dir) : dir_(std::move(dir)) {}
  std::unique_ptr<LlmBackend> backend_for(const SessionKey& key) override;
  std::optional<std::filesystem::path> locate(const SessionKey& key) const;

 private:
  std::filesystem::path dir_;
};

class SharedLiveProvider : public BackendProvider {
 public:
  explicit SharedLiveProvider(LiveBackendConfig config);
  std::unique_ptr<LlmBackend> backend_for(const SessionKey& key) override;

 private:
  std::shared_ptr<LiveBackend> live_;
};

}  // namespace crashsift
