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

#include "crashsift/backends.hpp"

#include "crashsift/error.hpp"

namespace fs = std::filesystem;

namespace crashsift {

ScriptedBackend::ScriptedBackend(std::vector<std::string> responses, BackendKind kind)
    : responses_(std::move(responses)), kind_(kind) {}

ScriptedBackend ScriptedBackend::from_bundle(const SessionBundle& bundle, BackendKind kind) {
  return ScriptedBackend(bundle.model_responses(), kind);
}

std::string ScriptedBackend::complete(const std::vector<Message>&) {
  if (next_ >= responses_.size()) {
    throw Error(ErrorKind::ExhaustedScript,
                "script has no response #" + std::to_string(next_ + 1) + " (recorded " +
                    std::to_string(responses_.size()) + ")");
  }
  return responses_[next_++];
}

std::string RecordedToolRunner::run(const ToolDirective& call) {
  if (next_ >= results_.size()) {
    throw Error(ErrorKind::ExhaustedScript, "no recorded result for tool call '" + call.name + "'");
  }
  return results_[next_++];
}

std::optional<fs::path> ScriptDirectoryProvider::locate(const SessionKey& key) const {
  const std::string cycle = std::to_string(key.cycle);
  const fs::path levels[] = {
      dir_ / key.benchmark_id / key.trial_id / cycle,
      dir_ / key.benchmark_id / key.trial_id,
      dir_ / key.benchmark_id / cycle,
      dir_ / key.benchmark_id,
      dir_,
  };
  std::vector<std::string> files;
  if (key.attempt > 1) files.push_back(bundle_file_name(key.agent, key.attempt));
  files.push_back(bundle_file_name(key.agent));
  std::error_code ec;
  for (const auto& level : levels) {
    for (const auto& file : files) {
      if (fs::is_regular_file(level / file, ec)) return level / file;
    }
  }
  return std::nullopt;
}

std::unique_ptr<LlmBackend> ScriptDirectoryProvider::backend_for(const SessionKey& key) {
  auto path = locate(key);
  if (!path) {
    throw Error(ErrorKind::ExhaustedScript,
                "no script for " + key.agent + " (benchmark " + key.benchmark_id + ", trial " +
                    key.trial_id + ", cycle " + std::to_string(key.cycle) + ") under " +
                    dir_.string());
  }
  return std::make_unique<ScriptedBackend>(ScriptedBackend::from_bundle(load_bundle(*path)));
}

namespace {

// Non-owning view onto a shared live backend.
class SharedBackendRef : public LlmBackend {
 public:
  explicit SharedBackendRef(std::shared_ptr<LiveBackend> live) : live_(std::move(live)) {}
  BackendKind kind() const override { return BackendKind::Live; }
  std::string complete(const std::vector<Message>& conversation) override {
    return live_->complete(conversation);
  }

 private:
  std::shared_ptr<LiveBackend> live_;
};

}  // namespace

SharedLiveProvider::SharedLiveProvider(LiveBackendConfig config)
    : live_(std::make_shared<LiveBackend>(std::move(config))) {}

std::unique_ptr<LlmBackend> SharedLiveProvider::backend_for(const SessionKey&) {
  return std::make_unique<SharedBackendRef>(live_);
}

}  // namespace crashsift
