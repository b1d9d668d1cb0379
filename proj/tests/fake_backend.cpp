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

// Scripted detector backend for the bridge tests. The first argument picks
// a behaviour; the bridge appends --serve.

#include <chrono>
#include <cstring>
#include <iostream>
#include <string>
#include <thread>

#include "cinemeta/detector/fixture.hpp"

namespace {

class Echo : public cinemeta::DetectorConnection {
 public:
  cinemeta::DetectorResponse Request(const cinemeta::DetectorRequest& r) override {
    return cinemeta::DetectorResponse::Success(
        r.id, cinemeta::Json{{"kind", ToString(r.kind)}, {"clip", r.clip}, {"frame", r.frame}, {"payload", r.payload}});
  }
};

}  // namespace

int main(int argc, char** argv) {
  const std::string mode = argc > 1 ? argv[1] : "";
  if (argc < 2 || std::strcmp(argv[argc - 1], "--serve") != 0) {
    std::cerr << "usage: fake_backend <mode> [args] --serve\n";
    return 2;
  }
  std::cerr << "fake_backend: mode " << mode << "\n";  // stderr stays out of the protocol
  if (mode == "echo") {
    Echo echo;
    cinemeta::ServeStream(std::cin, std::cout, echo);
    return 0;
  }
  if (mode == "fixtures" && argc == 4) {
    cinemeta::FixtureConnection fixtures(argv[2]);
    cinemeta::ServeStream(std::cin, std::cout, fixtures);
    return 0;
  }
  std::string line;
  if (mode == "wrong-id") {
    while (std::getline(std::cin, line)) std::cout << R"({"id":"nope","ok":true,"result":{}})" << std::endl;
  } else if (mode == "garbage") {
    while (std::getline(std::cin, line)) std::cout << "this is not json" << std::endl;
  } else if (mode == "both") {
    while (std::getline(std::cin, line)) {
      const auto j = cinemeta::Json::parse(line);
      std::cout << cinemeta::Json{{"id", j["id"]}, {"ok", true}, {"result", 1}, {"error", "x"}}.dump() << std::endl;
    }
  } else if (mode == "exit") {
    return 0;
  } else if (mode == "hang") {
    std::getline(std::cin, line);
    std::this_thread::sleep_for(std::chrono::seconds(30));
  } else {
    std::cerr << "unknown mode\n";
    return 2;
  }
  return 0;
}
