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

#include "crashsift/shared_repo.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cctype>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "crashsift/error.hpp"
#include "crashsift/util.hpp"

namespace fs = std::filesystem;

namespace crashsift {
namespace {

// Advisory exclusive lock on a file. Separate open() calls conflict even
// inside one process, so this also serializes threads.
class FileLock {
 public:
  explicit FileLock(const fs::path& path) {
    fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(ErrorKind::IOFailure, "cannot open lock " + path.string());
    while (::flock(fd_, LOCK_EX) != 0) {
      if (errno != EINTR) {
        ::close(fd_);
        throw Error(ErrorKind::IOFailure, "flock failed on " + path.string());
      }
    }
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

bool safe_component(std::string_view id) {
  if (id.empty() || id.front() == '.' || id.size() > 128) return false;
  for (char c : id) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) return false;
  }
  return true;
}

fs::path checked_relative(std::string_view relative) {
  fs::path p = fs::path(std::string(relative)).lexically_normal();
  if (p.empty() || p.is_absolute() || *p.begin() == "..") {
    throw Error(ErrorKind::PathEscape, "repository path escapes its namespace: " + std::string(relative));
  }
  return p;
}

}  // namespace

Manifest hash_tree(const fs::path& dir) {
  Manifest m;
  if (!fs::exists(dir)) return m;
  for (auto it = fs::recursive_directory_iterator(dir); it != fs::recursive_directory_iterator(); ++it) {
    if (!it->is_regular_file() || it->is_symlink()) continue;
    m[it->path().lexically_relative(dir).generic_string()] = sha256_hex(read_file(it->path()));
  }
  return m;
}

SharedRepository::SharedRepository(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_ / ".manifests");
  fs::create_directories(root_ / ".locks");
  root_ = fs::canonical(root_);
}

fs::path SharedRepository::namespace_dir(std::string_view benchmark_id) const {
  if (!safe_component(benchmark_id)) {
    throw Error(ErrorKind::InvalidConfig, "bad benchmark id '" + std::string(benchmark_id) + "'");
  }
  return root_ / std::string(benchmark_id);
}

fs::path SharedRepository::manifest_path(std::string_view benchmark_id) const {
  namespace_dir(benchmark_id);
  return root_ / ".manifests" / (std::string(benchmark_id) + ".json");
}

fs::path SharedRepository::lock_path(std::string_view benchmark_id) const {
  namespace_dir(benchmark_id);
  return root_ / ".locks" / (std::string(benchmark_id) + ".lock");
}

Manifest SharedRepository::manifest(std::string_view benchmark_id) const {
  const fs::path p = manifest_path(benchmark_id);
  if (!fs::exists(p)) return {};
  try {
    return nlohmann::json::parse(read_file(p)).get<Manifest>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, "manifest " + p.string() + ": " + e.what());
  }
}

void SharedRepository::save_manifest(std::string_view benchmark_id, const Manifest& m) const {
  write_file_atomic(manifest_path(benchmark_id), nlohmann::json(m).dump(2) + "\n");
}

Manifest SharedRepository::scan(std::string_view benchmark_id) const {
  return hash_tree(namespace_dir(benchmark_id));
}

Workspace SharedRepository::provision(std::string_view benchmark_id, const fs::path& dir) {
  const fs::path ns = namespace_dir(benchmark_id);
  FileLock lock(lock_path(benchmark_id));
  fs::remove_all(dir);
  fs::create_directories(dir);
  if (fs::exists(ns)) {
    fs::copy(ns, dir, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
  }
  return Workspace{std::string(benchmark_id), dir, hash_tree(dir)};
}

SyncSummary SharedRepository::sync(const Workspace& ws) {
  const fs::path ns = namespace_dir(ws.benchmark_id);
  FileLock lock(lock_path(ws.benchmark_id));
  Manifest current = manifest(ws.benchmark_id);
  SyncSummary summary;
  for (const auto& [rel, hash] : hash_tree(ws.dir)) {
    auto base = ws.base.find(rel);
    auto now = current.find(rel);
    const bool touched = base == ws.base.end() || base->second != hash;
    if (!touched || (now != current.end() && now->second == hash)) {
      ++summary.unchanged;
      continue;
    }
    const bool repo_moved = base == ws.base.end()
                                ? now != current.end()
                                : (now == current.end() || now->second != base->second);
    if (repo_moved) {
      summary.conflicts.push_back(rel);
      spdlog::warn("sync conflict in {}/{}: changed in the repository since provisioning; "
                   "keeping the workspace version",
                   ws.benchmark_id, rel);
    }
    if (now == current.end()) {
      ++summary.added;
    } else {
      ++summary.modified;
    }
    write_file_atomic(ns / rel, read_file(ws.dir / rel));
    current[rel] = hash;
  }
  save_manifest(ws.benchmark_id, current);
  return summary;
}

void SharedRepository::write(std::string_view benchmark_id, std::string_view relative,
                             std::string_view content) {
  const fs::path ns = namespace_dir(benchmark_id);
  const fs::path rel = checked_relative(relative);
  FileLock lock(lock_path(benchmark_id));
  Manifest current = manifest(benchmark_id);
  write_file_atomic(ns / rel, content);
  current[rel.generic_string()] = sha256_hex(content);
  save_manifest(benchmark_id, current);
}

}  // namespace crashsift
