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

#include "crashsift/process.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstdlib>
#include <cstring>

#include "crashsift/error.hpp"

namespace crashsift {
namespace {

class Pipe {
 public:
  Pipe() {
    if (::pipe2(fds_, O_CLOEXEC) != 0) {
      throw Error(ErrorKind::IOFailure,
                  std::string("pipe2: ") + std::strerror(errno));
    }
  }
  ~Pipe() {
    close_read();
    close_write();
  }
  Pipe(const Pipe&) = delete;
  Pipe& operator=(const Pipe&) = delete;

  int read_end() const { return fds_[0]; }
  int write_end() const { return fds_[1]; }
  void close_read() {
    if (fds_[0] >= 0) ::close(fds_[0]);
    fds_[0] = -1;
  }
  void close_write() {
    if (fds_[1] >= 0) ::close(fds_[1]);
    fds_[1] = -1;
  }

 private:
  int fds_[2] = {-1, -1};
};

void append_capped(std::string& out, bool& truncated, const char* data,
                   std::size_t n, std::size_t cap) {
  if (out.size() >= cap) {
    if (n > 0) truncated = true;
    return;
  }
  std::size_t room = cap - out.size();
  if (n > room) {
    out.append(data, room);
    truncated = true;
  } else {
    out.append(data, n);
  }
}

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv,
                          const ProcessOptions& options) {
  if (argv.empty()) {
    throw Error(ErrorKind::IOFailure, "run_process: empty argv");
  }
  Pipe out_pipe;
  Pipe err_pipe;

  // Everything the child needs is prepared before fork().
  std::vector<char*> c_argv;
  c_argv.reserve(argv.size() + 1);
  for (const auto& a : argv) c_argv.push_back(const_cast<char*>(a.c_str()));
  c_argv.push_back(nullptr);
  std::string cwd = options.working_dir.string();
  std::vector<std::string> env_pairs;
  for (const auto& [k, v] : options.extra_env) env_pairs.push_back(k + "=" + v);

  pid_t pid = ::fork();
  if (pid < 0) {
    throw Error(ErrorKind::IOFailure, std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::setpgid(0, 0);
    int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
    ::dup2(out_pipe.write_end(), STDOUT_FILENO);
    ::dup2(err_pipe.write_end(), STDERR_FILENO);
    if (!cwd.empty() && ::chdir(cwd.c_str()) != 0) ::_exit(126);
    for (auto& kv : env_pairs) ::putenv(kv.data());
    ::execvp(c_argv[0], c_argv.data());
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  out_pipe.close_write();
  err_pipe.close_write();

  ProcessResult result;
  const auto deadline = std::chrono::steady_clock::now() + options.timeout;
  std::array<char, 8192> buf{};
  bool out_open = true;
  bool err_open = true;
  while (out_open || err_open) {
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (remaining.count() <= 0) {
      result.timed_out = true;
      ::kill(-pid, SIGKILL);
      break;
    }
    pollfd fds[2];
    int nfds = 0;
    int out_idx = -1;
    int err_idx = -1;
    if (out_open) {
      out_idx = nfds;
      fds[nfds++] = {out_pipe.read_end(), POLLIN, 0};
    }
    if (err_open) {
      err_idx = nfds;
      fds[nfds++] = {err_pipe.read_end(), POLLIN, 0};
    }
    int rc = ::poll(fds, nfds, static_cast<int>(remaining.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      ::kill(-pid, SIGKILL);
      throw Error(ErrorKind::IOFailure, std::string("poll: ") + std::strerror(errno));
    }
    auto drain = [&](int idx, int fd, std::string& sink, bool& trunc, bool& open) {
      if (idx < 0 || fds[idx].revents == 0) return;
      ssize_t n = ::read(fd, buf.data(), buf.size());
      if (n > 0) {
        append_capped(sink, trunc, buf.data(), static_cast<std::size_t>(n),
                      options.output_cap);
      } else if (n == 0 || (n < 0 && errno != EINTR && errno != EAGAIN)) {
        open = false;
      }
    };
    drain(out_idx, out_pipe.read_end(), result.stdout_text,
          result.stdout_truncated, out_open);
    drain(err_idx, err_pipe.read_end(), result.stderr_text,
          result.stderr_truncated, err_open);
  }

  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  // Grandchildren may still hold the pipes open after a kill.
  ::kill(-pid, SIGKILL);
  if (WIFEXITED(status)) {
    result.exit_status = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.exit_status = 128 + WTERMSIG(status);
  }
  return result;
}

}  // namespace crashsift
