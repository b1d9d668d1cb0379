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

// Client-side handle over a connection, and a thread-safe pool of them.

#ifndef CINEMETA_DETECTOR_CLIENT_HPP_
#define CINEMETA_DETECTOR_CLIENT_HPP_

#include <chrono>
#include <condition_variable>
#include <fstream>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "cinemeta/detector/fixture.hpp"
#include "cinemeta/detector/process.hpp"

namespace cinemeta {

// Appends one {"request":..., "response":...} line per exchange.
class Transcript {
 public:
  explicit Transcript(const fs::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) Fail(ErrorCode::kIo, "cannot open transcript '" + path.string() + "'");
  }
  void Record(const DetectorRequest& req, const DetectorResponse& resp) {
    const std::string line = Json{{"request", ToJson(req)}, {"response", ToJson(resp)}}.dump();
    std::lock_guard lock(mu_);
    out_ << line << '\n' << std::flush;
  }

 private:
  std::mutex mu_;
  std::ofstream out_;
};

class DetectorClient {
 public:
  DetectorClient(std::unique_ptr<DetectorConnection> connection, std::set<DetectorKind> kinds,
                 std::shared_ptr<Transcript> transcript = nullptr)
      : connection_(std::move(connection)), kinds_(std::move(kinds)), transcript_(std::move(transcript)) {}

  bool Supports(DetectorKind kind) const { return connection_ && kinds_.contains(kind); }

  // ok=false responses are returned, not thrown; callers treat them as an
  // absent field. Transport failures throw.
  DetectorResponse Call(DetectorKind kind, const std::string& clip, int frame, Json payload = Json::object()) {
    if (!Supports(kind))
      Fail(ErrorCode::kDetectorUnavailable, "no backend configured for " + std::string(ToString(kind)));
    DetectorRequest req{"r" + std::to_string(++sequence_), kind, clip, frame, std::move(payload)};
    DetectorResponse resp;
    try {
      resp = connection_->Request(req);
    } catch (const Error&) {
      broken_ = true;
      throw;
    }
    if (resp.id != req.id) {
      broken_ = true;
      Fail(ErrorCode::kProtocolError, "response id '" + resp.id + "' does not match request '" + req.id + "'");
    }
    if (transcript_) transcript_->Record(req, resp);
    return resp;
  }

 private:
  std::unique_ptr<DetectorConnection> connection_;
  std::set<DetectorKind> kinds_;
  std::shared_ptr<Transcript> transcript_;
  std::uint64_t sequence_ = 0;
  bool broken_ = false;

 public:
  // True once a call failed in transport; the connection is not reused.
  bool broken() const { return broken_; }
};

struct BackendSpec {
  enum class Type { kNone, kFixtures, kProcess };
  Type type = Type::kNone;
  fs::path root;        // fixtures
  std::string command;  // process; "--serve" is appended
  std::set<DetectorKind> kinds{kAllDetectorKinds.begin(), kAllDetectorKinds.end()};
  std::chrono::milliseconds timeout = std::chrono::seconds(30);
  fs::path transcript;  // optional

  // {"backend": "fixtures"|"process"|"none", "root", "command", "kinds",
  //  "timeout_s", "transcript"}; relative paths resolve against base_dir.
  static BackendSpec FromJson(const Json& j, const fs::path& base_dir) {
    BackendSpec s;
    if (j.is_null()) return s;
    if (!j.is_object()) Fail(ErrorCode::kConfig, "detectors must be an object");
    const std::string backend = j.value("backend", "none");
    auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base_dir / p; };
    if (backend == "fixtures") {
      s.type = Type::kFixtures;
      if (!j.contains("root")) Fail(ErrorCode::kConfig, "fixture backend needs 'root'");
      s.root = resolve(j.at("root").get<std::string>());
    } else if (backend == "process") {
      s.type = Type::kProcess;
      if (!j.contains("command")) Fail(ErrorCode::kConfig, "process backend needs 'command'");
      s.command = j.at("command").get<std::string>();
    } else if (backend != "none") {
      Fail(ErrorCode::kConfig, "unknown detector backend '" + backend + "'");
    }
    if (j.contains("kinds")) {
      s.kinds.clear();
      for (const auto& k : j.at("kinds")) {
        const auto kind = DetectorKindFromString(k.get<std::string>());
        if (!kind) Fail(ErrorCode::kConfig, "unknown detector kind '" + k.get<std::string>() + "'");
        s.kinds.insert(*kind);
      }
    }
    if (j.contains("timeout_s"))
      s.timeout = std::chrono::milliseconds(static_cast<long long>(j.at("timeout_s").get<double>() * 1000));
    if (j.contains("transcript")) s.transcript = resolve(j.at("transcript").get<std::string>());
    return s;
  }
};

inline std::unique_ptr<DetectorConnection> OpenConnection(const BackendSpec& spec) {
  switch (spec.type) {
    case BackendSpec::Type::kNone: return nullptr;
    case BackendSpec::Type::kFixtures: return std::make_unique<FixtureConnection>(spec.root, spec.kinds);
    case BackendSpec::Type::kProcess: return std::make_unique<ProcessConnection>(spec.command, spec.timeout);
  }
  return nullptr;
}

// Hands out at most `capacity` clients, opening them lazily. Leases return
// their client on destruction; a client whose connection broke is dropped
// rather than reused.
class DetectorPool {
 public:
  DetectorPool(BackendSpec spec, std::size_t capacity) : spec_(std::move(spec)), capacity_(capacity ? capacity : 1) {
    if (!spec_.transcript.empty()) transcript_ = std::make_shared<Transcript>(spec_.transcript);
  }

  class Lease {
   public:
    Lease(DetectorPool* pool, std::unique_ptr<DetectorClient> client) : pool_(pool), client_(std::move(client)) {}
    Lease(Lease&&) = default;
    Lease& operator=(Lease&&) = default;
    ~Lease() {
      if (pool_ && client_) pool_->Return(std::move(client_));
    }
    DetectorClient& operator*() { return *client_; }
    DetectorClient* operator->() { return client_.get(); }

   private:
    DetectorPool* pool_;
    std::unique_ptr<DetectorClient> client_;
  };

  Lease Acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return !idle_.empty() || open_ < capacity_; });
    if (!idle_.empty()) {
      auto client = std::move(idle_.back());
      idle_.pop_back();
      return Lease(this, std::move(client));
    }
    ++open_;
    lock.unlock();
    try {
      auto kinds = spec_.type == BackendSpec::Type::kNone ? std::set<DetectorKind>{} : spec_.kinds;
      return Lease(this, std::make_unique<DetectorClient>(OpenConnection(spec_), std::move(kinds), transcript_));
    } catch (...) {
      std::lock_guard relock(mu_);
      --open_;
      cv_.notify_one();
      throw;
    }
  }

  const BackendSpec& spec() const { return spec_; }

 private:
  // A broken client is destroyed after the lock is released; closing a
  // process connection may wait on the child.
  void Return(std::unique_ptr<DetectorClient> client) {
    std::lock_guard lock(mu_);
    if (client->broken()) {
      --open_;
    } else {
      idle_.push_back(std::move(client));
    }
    cv_.notify_one();
  }

  BackendSpec spec_;
  std::size_t capacity_;
  std::shared_ptr<Transcript> transcript_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::vector<std::unique_ptr<DetectorClient>> idle_;
  std::size_t open_ = 0;
};

}  // namespace cinemeta

#endif  // CINEMETA_DETECTOR_CLIENT_HPP_
