// Copyright 2026 The Cinemeta Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Detector backends in a child process speaking the protocol on its
// standard input and output.

#ifndef CINEMETA_DETECTOR_PROCESS_HPP_
#define CINEMETA_DETECTOR_PROCESS_HPP_

#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <string>
#include <thread>

#include "cinemeta/detector/fixture.hpp"

namespace cinemeta {

// Runs `<command> --serve` through /bin/sh. A connection that timed out
// or saw the backend exit is broken for good.
class ProcessConnection : public DetectorConnection {
 public:
  explicit ProcessConnection(const std::string& command,
                             std::chrono::milliseconds timeout = std::chrono::seconds(30))
      : timeout_(timeout) {
    int sv[2];
    if (socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0)
      Fail(ErrorCode::kDetectorUnavailable, std::string("socketpair: ") + std::strerror(errno));
    const std::string line = command + " --serve";
    pid_ = fork();
    if (pid_ < 0) {
      close(sv[0]);
      close(sv[1]);
      Fail(ErrorCode::kDetectorUnavailable, std::string("fork: ") + std::strerror(errno));
    }
    if (pid_ == 0) {
      dup2(sv[1], STDIN_FILENO);
      dup2(sv[1], STDOUT_FILENO);
      execl("/bin/sh", "sh", "-c", line.c_str(), static_cast<char*>(nullptr));
      _exit(127);
    }
    close(sv[1]);
    fd_ = sv[0];
  }

  ProcessConnection(const ProcessConnection&) = delete;
  ProcessConnection& operator=(const ProcessConnection&) = delete;

  ~ProcessConnection() override { Shutdown(std::chrono::seconds(1)); }

  DetectorResponse Request(const DetectorRequest& request) override {
    if (broken_) Fail(ErrorCode::kBackendExit, "detector connection is closed");
    const auto deadline = std::chrono::steady_clock::now() + timeout_;
    std::string out = ToJson(request).dump();
    out += '\n';
    WriteAll(out, deadline);
    const std::string line = ReadLine(deadline);
    DetectorResponse response;
    try {
      response = ParseResponse(line);
    } catch (const Error&) {
      broken_ = true;
      throw;
    }
    if (response.id != request.id) {
      broken_ = true;
      Fail(ErrorCode::kProtocolError, "response id '" + response.id + "' does not match request '" + request.id + "'");
    }
    return response;
  }

  pid_t pid() const { return pid_; }

 private:
  int RemainingMs(std::chrono::steady_clock::time_point deadline) const {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    return static_cast<int>(std::max<long long>(0, left.count()));
  }

  [[noreturn]] void Break(ErrorCode code, const std::string& msg) {
    broken_ = true;
    Shutdown(std::chrono::milliseconds(0));
    Fail(code, msg);
  }

  void WaitReady(short events, std::chrono::steady_clock::time_point deadline) {
    pollfd p{fd_, events, 0};
    for (;;) {
      const int r = poll(&p, 1, RemainingMs(deadline));
      if (r > 0) return;
      if (r == 0) Break(ErrorCode::kTimeout, "detector backend did not answer in time");
      if (errno != EINTR) Break(ErrorCode::kBackendExit, std::string("poll: ") + std::strerror(errno));
    }
  }

  void WriteAll(const std::string& data, std::chrono::steady_clock::time_point deadline) {
    std::size_t done = 0;
    while (done < data.size()) {
      WaitReady(POLLOUT, deadline);
      const ssize_t n = send(fd_, data.data() + done, data.size() - done, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        Break(ErrorCode::kBackendExit, "detector backend closed its input");
      }
      done += static_cast<std::size_t>(n);
    }
  }

  std::string ReadLine(std::chrono::steady_clock::time_point deadline) {
    for (;;) {
      const auto nl = buffer_.find('\n');
      if (nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      WaitReady(POLLIN, deadline);
      char chunk[65536];
      const ssize_t n = recv(fd_, chunk, sizeof chunk, 0);
      if (n < 0) {
        if (errno == EINTR || errno == EAGAIN) continue;
        Break(ErrorCode::kBackendExit, std::string("read from detector backend: ") + std::strerror(errno));
      }
      if (n == 0) Break(ErrorCode::kBackendExit, "detector backend exited");
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  // Closes our end, gives the child `grace` to exit on end of input, then
  // kills it.
  void Shutdown(std::chrono::milliseconds grace) {
    if (fd_ >= 0) {
      close(fd_);
      fd_ = -1;
    }
    if (pid_ <= 0) return;
    const auto deadline = std::chrono::steady_clock::now() + grace;
    int status = 0;
    while (waitpid(pid_, &status, WNOHANG) == 0) {
      if (std::chrono::steady_clock::now() >= deadline) {
        kill(pid_, SIGKILL);
        waitpid(pid_, &status, 0);
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    pid_ = -1;
  }

  std::chrono::milliseconds timeout_;
  pid_t pid_ = -1;
  int fd_ = -1;
  std::string buffer_;
  bool broken_ = false;
};

}  // namespace cinemeta

#endif  // CINEMETA_DETECTOR_PROCESS_HPP_
