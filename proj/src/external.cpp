#include "pitchlab/external.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cerrno>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <string>

#include "pitchlab/error.hpp"
#include "pitchlab/log.hpp"

extern char** environ;

namespace pitchlab {
namespace {

using Clock = std::chrono::steady_clock;

class Fd {
 public:
  explicit Fd(int fd = -1) : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  Fd(Fd&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}
  ~Fd() { reset(); }

  int get() const noexcept { return fd_; }
  void reset() noexcept {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_;
};

// Owns a spawned child that leads its own process group. Destruction kills
// the whole group, so programs started by the shell die with it, and reaps
// the child unless that already happened.
class Child {
 public:
  explicit Child(pid_t pid) : pid_(pid), group_(pid) {}
  Child(const Child&) = delete;
  Child& operator=(const Child&) = delete;
  ~Child() {
    ::kill(-group_, SIGKILL);
    if (pid_ > 0) {
      int status = 0;
      while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
      }
    }
  }

  // Waits until the child exits or the deadline passes.
  void reap_until(Clock::time_point deadline) {
    while (pid_ > 0) {
      int status = 0;
      const pid_t r = ::waitpid(pid_, &status, WNOHANG);
      if (r == pid_ || (r < 0 && errno != EINTR)) {
        pid_ = -1;
        return;
      }
      if (Clock::now() >= deadline) return;
      ::usleep(1000);
    }
  }

 private:
  pid_t pid_;
  pid_t group_;
};

std::string trim_line(std::string_view s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  return std::string(s);
}

PitchEstimate failed(const ExternalEstimator& est, const std::string& why) {
  log::warn("external estimator '" + est.name + "': " + why + "; treating note as unvoiced");
  return PitchEstimate::unvoiced(est.name);
}

}  // namespace

void ExternalEstimator::validate() const {
  if (command.empty()) throw Error(Errc::invalid_config, "external estimator command is empty");
  if (!(timeout_s > 0.0)) throw Error(Errc::invalid_config, "external estimator timeout must be positive");
  if (!(f_min >= 0.0) || !(f_min < f_max)) throw Error(Errc::invalid_config, "external estimator range is empty");
}

std::string encode_external_request(std::span<const double> samples, int sample_rate) {
  std::string out = "RATE " + std::to_string(sample_rate) + " COUNT " + std::to_string(samples.size()) + "\n";
  const std::size_t header = out.size();
  out.resize(header + 4 * samples.size());
  char* p = out.data() + header;
  for (double s : samples) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(s));
    for (int i = 0; i < 4; ++i) *p++ = static_cast<char>((bits >> (8 * i)) & 0xFF);
  }
  return out;
}

std::optional<double> parse_external_reply(std::string_view line) {
  const std::string s = trim_line(line);
  if (s == "UNVOICED") return std::nullopt;
  if (s.size() > 3 && s.compare(0, 3, "F0 ") == 0) {
    double value = 0.0;
    const char* begin = s.data() + 3;
    const char* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec == std::errc() && ptr == end && std::isfinite(value) && value > 0.0) return value;
  }
  throw Error(Errc::protocol_violation, "malformed reply '" + s + "'");
}

PitchEstimate run_external(const ExternalEstimator& est, std::span<const double> samples, int sample_rate) {
  try {
    est.validate();
  } catch (const Error& e) {
    return failed(est, e.what());
  }
  const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                           std::chrono::duration<double>(est.timeout_s));
  const std::string request = encode_external_request(samples, sample_rate);

  int in_pair[2];
  int out_pair[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, in_pair) != 0) return failed(est, "socketpair failed");
  Fd to_child(in_pair[0]), child_stdin(in_pair[1]);
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, out_pair) != 0) return failed(est, "socketpair failed");
  Fd from_child(out_pair[0]), child_stdout(out_pair[1]);

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, child_stdin.get(), STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, child_stdout.get(), STDOUT_FILENO);
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);
  const char* argv[] = {"sh", "-c", est.command.c_str(), nullptr};
  pid_t pid = -1;
  const int rc = ::posix_spawn(&pid, "/bin/sh", &actions, &attr, const_cast<char**>(argv), environ);
  posix_spawnattr_destroy(&attr);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) return failed(est, std::string("spawn failed: ") + std::strerror(rc));
  Child child(pid);
  child_stdin.reset();
  child_stdout.reset();
  ::fcntl(to_child.get(), F_SETFL, O_NONBLOCK);
  ::fcntl(from_child.get(), F_SETFL, O_NONBLOCK);

  std::size_t written = 0;
  bool writing = true;
  std::string reply;
  bool have_line = false;
  bool eof = false;
  char buf[256];

  while (!have_line && !eof) {
    const auto now = Clock::now();
    if (now >= deadline) {
      return failed(est, "timed out after " + std::to_string(est.timeout_s) + " s");
    }
    const int wait_ms = static_cast<int>(
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count() + 1);
    pollfd fds[2] = {{from_child.get(), POLLIN, 0}, {to_child.get(), POLLOUT, 0}};
    const int nfds = writing ? 2 : 1;
    const int ready = ::poll(fds, nfds, wait_ms);
    if (ready < 0) {
      if (errno == EINTR) continue;
      return failed(est, "poll failed");
    }
    if (writing && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
      const ssize_t n = ::send(to_child.get(), request.data() + written, request.size() - written,
                               MSG_NOSIGNAL | MSG_DONTWAIT);
      if (n > 0) written += static_cast<std::size_t>(n);
      if ((n < 0 && errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR) || written == request.size()) {
        // Either done or the child stopped reading; a reply may still come.
        writing = false;
        ::shutdown(to_child.get(), SHUT_WR);
      }
    }
    if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
      const ssize_t n = ::recv(from_child.get(), buf, sizeof buf, MSG_DONTWAIT);
      if (n > 0) {
        reply.append(buf, static_cast<std::size_t>(n));
        have_line = reply.find('\n') != std::string::npos;
      } else if (n == 0 || (errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR)) {
        eof = true;
      }
    }
  }

  // Give a well-behaved child a moment to exit before the group is killed.
  child.reap_until(std::min(deadline, Clock::now() + std::chrono::milliseconds(50)));
  const std::string line = reply.substr(0, reply.find('\n'));
  std::optional<double> f0;
  try {
    f0 = parse_external_reply(line);
  } catch (const Error& e) {
    return failed(est, e.what());
  }
  if (!f0) return PitchEstimate::unvoiced(est.name);
  if (*f0 < est.f_min || *f0 > est.f_max) {
    return failed(est, "reply " + std::to_string(*f0) + " Hz outside declared range [" + std::to_string(est.f_min) +
                           ", " + std::to_string(est.f_max) + "]");
  }
  return PitchEstimate{f0, est.name, {}};
}

}  // namespace pitchlab
