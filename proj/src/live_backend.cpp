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

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <cstdlib>
#include <regex>

#include <nlohmann/json.hpp>

#include "crashsift/backends.hpp"
#include "crashsift/error.hpp"

namespace crashsift {

LiveBackend::LiveBackend(LiveBackendConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty() || config_.model.empty()) {
    throw Error(ErrorKind::InvalidConfig, "live backend needs an endpoint and a model id");
  }
}

std::string LiveBackend::complete(const std::vector<Message>& conversation) {
  std::lock_guard<std::mutex> lock(mu_);
  for (int attempt = 0;; ++attempt) {
    try {
      return request_once(conversation);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BackendUnavailable || attempt >= config_.retries) throw;
    }
  }
}

std::string LiveBackend::request_once(const std::vector<Message>& conversation) {
  static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(config_.endpoint, m, url_re)) {
    throw Error(ErrorKind::InvalidConfig, "bad endpoint URL '" + config_.endpoint + "'");
  }
  const std::string base = m[1].str();
  const std::string path = m[2].matched ? m[2].str() : "/v1/chat/completions";

  nlohmann::json body;
  body["model"] = config_.model;
  body["temperature"] = config_.temperature;
  body["messages"] = nlohmann::json::array();
  for (const auto& msg : conversation) {
    body["messages"].push_back(
        {{"role", msg.role == Message::Role::User ? "user" : "assistant"}, {"content", msg.text}});
  }

  httplib::Client client(base);
  client.set_connection_timeout(std::chrono::seconds(15));
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);
  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorKind::BackendUnavailable,
                "request to " + config_.endpoint + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status >= 500 || res->status == 429) {
    throw Error(ErrorKind::BackendUnavailable,
                "endpoint returned HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw Error(ErrorKind::BackendUnavailable,
                "endpoint returned HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 512));
  }
  try {
    auto j = nlohmann::json::parse(res->body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::BackendUnavailable, std::string("unexpected response shape: ") + e.what());
  }
}

}  // namespace crashsift
