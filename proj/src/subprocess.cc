// Copyright 2026 The patfuzz Authors.
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

#include "patfuzz/subprocess.h"

#include <errno.h>
#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/mman.h>
#include <sys/prctl.h>
#include <sys/socket.h>
#include <sys/stat.h>
#include <sys/syscall.h>
#include <sys/wait.h>
#include <time.h>
#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <filesystem>

#include "absl/strings/str_cat.h"

extern char **environ;

namespace patfuzz {
namespace {

struct Request {
  uint32_t index;
  uint32_t timeout_ms;
};

struct Reply {
  int32_t outcome;
  int32_t value;
  uint64_t elapsed_us;
};

// Pointer arrays prepared before the helper is forked; the helper itself
// only makes system calls.
struct Prepared {
  std::vector<std::vector<std::string>> argv;
  std::vector<std::vector<std::string>> envp;
  std::vector<std::vector<char *>> argv_ptrs;
  std::vector<std::vector<char *>> envp_ptrs;
  std::vector<std::string> stdin_path;  // Empty for file delivery.
};

uint64_t NowUs() {
  struct timespec ts;
  clock_gettime(CLOCK_MONOTONIC, &ts);
  return static_cast<uint64_t>(ts.tv_sec) * 1000000 + ts.tv_nsec / 1000;
}

bool ReadFull(int fd, void *buf, size_t n) {
  auto *p = static_cast<char *>(buf);
  while (n > 0) {
    const ssize_t r = read(fd, p, n);
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) return false;
    p += r;
    n -= static_cast<size_t>(r);
  }
  return true;
}

bool SendFull(int fd, const void *buf, size_t n) {
  auto *p = static_cast<const char *>(buf);
  while (n > 0) {
    const ssize_t r = send(fd, p, n, MSG_NOSIGNAL);
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) return false;
    p += r;
    n -= static_cast<size_t>(r);
  }
  return true;
}

// Waits for `pid` until `deadline_us`; kills it if the deadline passes.
Reply Reap(pid_t pid, uint64_t start_us, uint64_t deadline_us) {
  bool timed_out = false;
  bool reaped = false;
  int status = 0;
  const int pidfd = static_cast<int>(syscall(SYS_pidfd_open, pid, 0));
  if (pidfd >= 0) {
    while (true) {
      const uint64_t now = NowUs();
      if (now >= deadline_us) {
        timed_out = true;
        break;
      }
      struct pollfd pfd = {pidfd, POLLIN, 0};
      const int ms = static_cast<int>((deadline_us - now + 999) / 1000);
      const int r = poll(&pfd, 1, ms);
      if (r > 0 || (r < 0 && errno != EINTR)) break;
    }
    close(pidfd);
  } else {
    // No pidfd support: poll waitpid.
    while (!(reaped = waitpid(pid, &status, WNOHANG) == pid)) {
      if (NowUs() >= deadline_us) {
        timed_out = true;
        break;
      }
      struct timespec ts = {0, 200000};
      nanosleep(&ts, nullptr);
    }
  }
  if (timed_out) {
    kill(-pid, SIGKILL);  // The child leads its own process group.
    kill(pid, SIGKILL);
  }
  while (!reaped && waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  Reply reply{static_cast<int32_t>(ProcessOutcome::kExited), 0,
              NowUs() - start_us};
  if (timed_out) {
    reply.outcome = static_cast<int32_t>(ProcessOutcome::kTimedOut);
  } else if (WIFSIGNALED(status)) {
    reply.outcome = static_cast<int32_t>(ProcessOutcome::kSignaled);
    reply.value = WTERMSIG(status);
  } else {
    reply.value = WEXITSTATUS(status);
  }
  return reply;
}

Reply RunOne(const Prepared &p, const Request &req) {
  Reply reply{static_cast<int32_t>(ProcessOutcome::kSpawnFailed), 0, 0};
  int err_pipe[2];
  if (pipe2(err_pipe, O_CLOEXEC) != 0) {
    reply.value = errno;
    return reply;
  }
  const uint64_t start = NowUs();
  const pid_t pid = fork();
  if (pid < 0) {
    reply.value = errno;
    close(err_pipe[0]);
    close(err_pipe[1]);
    return reply;
  }
  if (pid == 0) {
    close(err_pipe[0]);
    setpgid(0, 0);
    const std::string &in = p.stdin_path[req.index];
    const int stdin_fd =
        open(in.empty() ? "/dev/null" : in.c_str(), O_RDONLY);
    const int null_fd = open("/dev/null", O_WRONLY);
    if (stdin_fd >= 0) dup2(stdin_fd, 0);
    if (null_fd >= 0) {
      dup2(null_fd, 1);
      dup2(null_fd, 2);
    }
    execvpe(p.argv_ptrs[req.index][0], p.argv_ptrs[req.index].data(),
            p.envp_ptrs[req.index].data());
    const int e = errno;
    (void)!write(err_pipe[1], &e, sizeof(e));
    _exit(127);
  }
  close(err_pipe[1]);
  int exec_errno = 0;
  const bool exec_failed = ReadFull(err_pipe[0], &exec_errno, sizeof(exec_errno));
  close(err_pipe[0]);
  if (exec_failed) {
    int status;
    waitpid(pid, &status, 0);
    reply.value = exec_errno;
    return reply;
  }
  return Reap(pid, start, start + uint64_t{req.timeout_ms} * 1000);
}

[[noreturn]] void HelperMain(const Prepared &p, int sock) {
  prctl(PR_SET_PDEATHSIG, SIGKILL);
  while (true) {
    Request req;
    if (!ReadFull(sock, &req, sizeof(req))) _exit(0);
    Reply reply;
    if (req.index >= p.argv_ptrs.size()) {
      reply = {static_cast<int32_t>(ProcessOutcome::kSpawnFailed), EINVAL, 0};
    } else {
      reply = RunOne(p, req);
    }
    if (!SendFull(sock, &reply, sizeof(reply))) _exit(0);
  }
}

std::atomic<uint64_t> g_runner_serial{0};

}  // namespace

absl::StatusOr<std::unique_ptr<CommandRunner>> CommandRunner::Start(
    std::vector<CommandSpec> commands) {
  for (const CommandSpec &c : commands) {
    if (c.argv.empty() || c.argv[0].empty()) {
      return absl::InvalidArgumentError("external command has empty argv");
    }
  }
  std::unique_ptr<CommandRunner> runner(new CommandRunner(std::move(commands)));
  if (auto s = runner->Init(); !s.ok()) return s;
  return runner;
}

absl::Status CommandRunner::Init() {
  const char *tmp = std::getenv("TMPDIR");
  std::string templ = absl::StrCat(tmp && *tmp ? tmp : "/tmp", "/patfuzz-XXXXXX");
  if (mkdtemp(templ.data()) == nullptr) {
    return absl::UnavailableError(
        absl::StrCat("mkdtemp ", templ, ": ", std::strerror(errno)));
  }
  dir_ = templ;
  const uint64_t serial = g_runner_serial.fetch_add(1);

  Prepared p;
  std::vector<std::string> base_env;
  for (char **e = environ; e != nullptr && *e != nullptr; ++e) {
    if (std::strncmp(*e, kInternalEnvPrefix, std::strlen(kInternalEnvPrefix)) != 0) {
      base_env.emplace_back(*e);
    }
  }
  for (size_t i = 0; i < commands_.size(); ++i) {
    const CommandSpec &c = commands_[i];
    const std::string path = absl::StrCat(dir_, "/input-", i);
    input_paths_.push_back(path);
    std::vector<std::string> argv = c.argv;
    bool substituted = false;
    for (std::string &a : argv) {
      if (a == "@@") {
        a = path;
        substituted = true;
      }
    }
    if (c.delivery == InputDelivery::kFile && !substituted) argv.push_back(path);
    p.stdin_path.push_back(c.delivery == InputDelivery::kStdin ? path : "");
    std::vector<std::string> env = base_env;
    Channel ch;
    if (c.bitmap_size > 0) {
      ch.name = absl::StrCat("/patfuzz-", getpid(), "-", serial, "-", i);
      const int fd = shm_open(ch.name.c_str(), O_CREAT | O_EXCL | O_RDWR, 0600);
      if (fd < 0) {
        return absl::UnavailableError(
            absl::StrCat("shm_open ", ch.name, ": ", std::strerror(errno)));
      }
      if (ftruncate(fd, static_cast<off_t>(c.bitmap_size)) != 0) {
        close(fd);
        shm_unlink(ch.name.c_str());
        return absl::UnavailableError(
            absl::StrCat("ftruncate ", ch.name, ": ", std::strerror(errno)));
      }
      void *m = mmap(nullptr, c.bitmap_size, PROT_READ | PROT_WRITE,
                     MAP_SHARED, fd, 0);
      close(fd);
      if (m == MAP_FAILED) {
        shm_unlink(ch.name.c_str());
        return absl::UnavailableError(
            absl::StrCat("mmap ", ch.name, ": ", std::strerror(errno)));
      }
      ch.map = static_cast<uint8_t *>(m);
      ch.size = c.bitmap_size;
      env.push_back(absl::StrCat(kShmEnvVar, "=", ch.name));
    }
    channels_.push_back(ch);
    p.argv.push_back(std::move(argv));
    p.envp.push_back(std::move(env));
  }
  for (size_t i = 0; i < commands_.size(); ++i) {
    std::vector<char *> a, e;
    for (std::string &s : p.argv[i]) a.push_back(s.data());
    a.push_back(nullptr);
    for (std::string &s : p.envp[i]) e.push_back(s.data());
    e.push_back(nullptr);
    p.argv_ptrs.push_back(std::move(a));
    p.envp_ptrs.push_back(std::move(e));
  }

  int sv[2];
  if (socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0) {
    return absl::UnavailableError(
        absl::StrCat("socketpair: ", std::strerror(errno)));
  }
  const pid_t pid = fork();
  if (pid < 0) {
    close(sv[0]);
    close(sv[1]);
    return absl::UnavailableError(absl::StrCat("fork: ", std::strerror(errno)));
  }
  if (pid == 0) {
    // Drop every inherited descriptor, including other runners' sockets,
    // so their helpers still see EOF when their owners go away.
    const int sock = sv[1] == 3 ? 3 : dup2(sv[1], 3);
    if (syscall(SYS_close_range, 4u, ~0u, 0u) != 0) {
      for (long fd = 4, max = sysconf(_SC_OPEN_MAX); fd < max; ++fd) close(fd);
    }
    HelperMain(p, sock);
  }
  close(sv[1]);
  helper_ = pid;
  sock_ = sv[0];
  return absl::OkStatus();
}

CommandRunner::~CommandRunner() {
  if (sock_ >= 0) close(sock_);
  if (helper_ > 0) {
    int status;
    while (waitpid(helper_, &status, 0) < 0 && errno == EINTR) {
    }
  }
  for (Channel &ch : channels_) {
    if (ch.map != nullptr) {
      munmap(ch.map, ch.size);
      shm_unlink(ch.name.c_str());
    }
  }
  if (!dir_.empty()) {
    std::error_code ec;
    std::filesystem::remove_all(dir_, ec);
  }
}

absl::StatusOr<ProcessResult> CommandRunner::Run(size_t index, ByteSpan input,
                                                 uint32_t timeout_ms,
                                                 std::span<uint8_t> bitmap) {
  if (index >= commands_.size()) {
    return absl::InvalidArgumentError("command index out of range");
  }
  Channel &ch = channels_[index];
  if (ch.map != nullptr && bitmap.size() != ch.size) {
    return absl::InvalidArgumentError(absl::StrCat(
        "bitmap size ", bitmap.size(), " != channel size ", ch.size));
  }
  const std::string &path = input_paths_[index];
  const int fd = open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC,
                      0600);
  if (fd < 0) {
    return absl::UnavailableError(
        absl::StrCat("open ", path, ": ", std::strerror(errno)));
  }
  const bool wrote = input.empty() || write(fd, input.data(), input.size()) ==
                                          static_cast<ssize_t>(input.size());
  close(fd);
  if (!wrote) {
    return absl::UnavailableError(absl::StrCat("write ", path, " failed"));
  }
  if (ch.map != nullptr) std::memset(ch.map, 0, ch.size);

  const Request req{static_cast<uint32_t>(index), timeout_ms};
  Reply reply;
  if (!SendFull(sock_, &req, sizeof(req)) ||
      !ReadFull(sock_, &reply, sizeof(reply))) {
    return absl::UnavailableError("launcher helper process is gone");
  }
  if (ch.map != nullptr) std::memcpy(bitmap.data(), ch.map, ch.size);
  return ProcessResult{static_cast<ProcessOutcome>(reply.outcome),
                       reply.value, reply.elapsed_us};
}

}  // namespace patfuzz
