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

#include "crashsift/util.hpp"

#include <unistd.h>

#include <openssl/evp.h>

#include <atomic>
#include <cctype>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>
#include <thread>

#include "crashsift/error.hpp"

namespace fs = std::filesystem;

namespace crashsift {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DisallowedCommand: return "DisallowedCommand";
    case ErrorKind::Timeout: return "Timeout";
    case ErrorKind::PathEscape: return "PathEscape";
    case ErrorKind::EmptyProject: return "EmptyProject";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::BackendUnavailable: return "BackendUnavailable";
    case ErrorKind::ToolBudgetExhausted: return "ToolBudgetExhausted";
    case ErrorKind::MalformedOutput: return "MalformedOutput";
    case ErrorKind::UnboundPlaceholder: return "UnboundPlaceholder";
    case ErrorKind::UnknownTool: return "UnknownTool";
    case ErrorKind::BuildFailure: return "BuildFailure";
    case ErrorKind::ExecutorTimeout: return "ExecutorTimeout";
    case ErrorKind::NoCrashFound: return "NoCrashFound";
    case ErrorKind::SyncConflict: return "SyncConflict";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::UnbalancedTags: return "UnbalancedTags";
    case ErrorKind::SpecMismatch: return "SpecMismatch";
    case ErrorKind::ExhaustedScript: return "ExhaustedScript";
    case ErrorKind::InvalidBaseline: return "InvalidBaseline";
    case ErrorKind::PairMismatch: return "PairMismatch";
    case ErrorKind::PreconditionViolation: return "PreconditionViolation";
    case ErrorKind::IOFailure: return "IOFailure";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::IOFailure, "sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xf]);
  }
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IOFailure, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view data) {
  static std::atomic<unsigned> counter{0};
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ostringstream tmp_name;
  tmp_name << "." << path.filename().string() << ".tmp." << ::getpid() << "."
           << std::this_thread::get_id()
           << "." << counter.fetch_add(1);
  fs::path tmp = path.parent_path() / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IOFailure, "cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw Error(ErrorKind::IOFailure, "short write " + tmp.string());
  }
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error(ErrorKind::IOFailure, "rename to " + path.string() + ": " + ec.message());
  }
}

std::string utc_timestamp_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string normalize_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(c);
    }
  }
  return out;
}

bool is_within(const fs::path& root, const fs::path& p) {
  auto r = root.lexically_normal();
  auto q = p.lexically_normal();
  auto rit = r.begin();
  auto qit = q.begin();
  for (; rit != r.end(); ++rit, ++qit) {
    if (rit->empty()) continue;  // trailing separator
    if (qit == q.end() || *rit != *qit) return false;
  }
  return true;
}

}  // namespace crashsift
