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

// Detector connections: the in-process fixture backend and the serve loop
// that exposes any connection over a line stream.

#ifndef CINEMETA_DETECTOR_FIXTURE_HPP_
#define CINEMETA_DETECTOR_FIXTURE_HPP_

#include <filesystem>
#include <istream>
#include <ostream>
#include <set>
#include <string>

#include "cinemeta/detector/protocol.hpp"
#include "cinemeta/io.hpp"

namespace cinemeta {

// One request in flight at a time; not safe for concurrent callers.
class DetectorConnection {
 public:
  virtual ~DetectorConnection() = default;
  virtual DetectorResponse Request(const DetectorRequest& request) = 0;
};

// Serves `root/<clip>/<kind>/<key>.json`, where the key is the request's
// region for ocr and its frame number otherwise. A clip-wide `all.json`
// in the kind directory answers any key without its own file.
class FixtureConnection : public DetectorConnection {
 public:
  explicit FixtureConnection(fs::path root, std::set<DetectorKind> kinds = {kAllDetectorKinds.begin(),
                                                                           kAllDetectorKinds.end()})
      : root_(std::move(root)), kinds_(std::move(kinds)) {
    if (!fs::is_directory(root_)) Fail(ErrorCode::kDetectorUnavailable, "fixture root is not a directory: " + root_.string());
  }

  static std::string KeyFor(const DetectorRequest& r) {
    if (r.kind == DetectorKind::kOcr && r.payload.contains("region") && r.payload["region"].is_string())
      return r.payload["region"].get<std::string>();
    return std::to_string(r.frame);
  }

  DetectorResponse Request(const DetectorRequest& r) override {
    if (!kinds_.contains(r.kind)) return DetectorResponse::Failure(r.id, "unsupported kind");
    const fs::path dir = root_ / r.clip / std::string(ToString(r.kind));
    fs::path file = dir / (KeyFor(r) + ".json");
    if (!fs::exists(file)) file = dir / "all.json";
    if (!fs::exists(file)) return DetectorResponse::Failure(r.id, "no fixture");
    try {
      return DetectorResponse::Success(r.id, Json::parse(ReadFile(file)));
    } catch (const Json::parse_error& e) {
      Fail(ErrorCode::kProtocolError, "malformed fixture " + file.string() + ": " + e.what());
    }
  }

 private:
  fs::path root_;
  std::set<DetectorKind> kinds_;
};

// The backend side of the protocol: answers each request line on `in`
// with one response line on `out` until end of input. Returns the number
// of requests served.
inline int ServeStream(std::istream& in, std::ostream& out, DetectorConnection& backend) {
  int served = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    DetectorResponse response;
    try {
      response = backend.Request(ParseRequest(line));
    } catch (const Error& e) {
      // Echo the id when the line carries one so the client can pair it.
      std::string id;
      try {
        const Json j = Json::parse(line);
        if (j.is_object() && j.contains("id") && j["id"].is_string()) id = j["id"].get<std::string>();
      } catch (const Json::exception&) {
      }
      response = DetectorResponse::Failure(id, e.code() == ErrorCode::kUnknownLabel ? "unsupported kind" : e.what());
    }
    out << ToJson(response).dump() << '\n' << std::flush;
    ++served;
  }
  return served;
}

}  // namespace cinemeta

#endif  // CINEMETA_DETECTOR_FIXTURE_HPP_
