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

// Orchestrator-owned file store. Agents never touch it directly: each gets a
// private copy of its benchmark's namespace and its new or changed files are
// synced back afterwards.
//
//   <root>/<benchmark_id>/...            namespace contents
//   <root>/.manifests/<benchmark_id>.json  path -> sha256
//   <root>/.locks/<benchmark_id>.lock      flock(2) target

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace crashsift {

using Manifest = std::map<std::string, std::string>;  // relative path -> sha256 hex

struct Workspace {
  std::string benchmark_id;
  std::filesystem::path dir;
  Manifest base;  // namespace state at provisioning time
};

struct SyncSummary {
  int added = 0;
  int modified = 0;
  int unchanged = 0;
  // Paths changed both here and in the repo since provisioning; the
  // workspace version won.
  std::vector<std::string> conflicts;
};

class SharedRepository {
 public:
  // Creates root if needed.
  explicit SharedRepository(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  // Throws InvalidConfig for ids that are not a single safe path component.
  std::filesystem::path namespace_dir(std::string_view benchmark_id) const;

  // Replaces `dir` with a copy of the namespace.
  Workspace provision(std::string_view benchmark_id, const std::filesystem::path& dir);
  // Copies back every regular file whose hash differs from the base
  // manifest. Files the agent left alone are not written even when the repo
  // moved on. Deleted files are not propagated.
  SyncSummary sync(const Workspace& workspace);

  // Orchestrator-side helpers; serialized with provision/sync.
  void write(std::string_view benchmark_id, std::string_view relative, std::string_view content);
  Manifest manifest(std::string_view benchmark_id) const;
  // Hashes the namespace as it is on disk.
  Manifest scan(std::string_view benchmark_id) const;

 private:
  std::filesystem::path manifest_path(std::string_view benchmark_id) const;
  std::filesystem::path lock_path(std::string_view benchmark_id) const;
  void save_manifest(std::string_view benchmark_id, const Manifest& m) const;

  std::filesystem::path root_;
};

// Hashes of every regular file under dir, keyed by generic relative path.
Manifest hash_tree(const std::filesystem::path& dir);

}  // namespace crashsift
