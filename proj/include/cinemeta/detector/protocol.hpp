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

// Wire format of the detector protocol: one JSON object per line in each
// direction, strictly alternating request and response.

#ifndef CINEMETA_DETECTOR_PROTOCOL_HPP_
#define CINEMETA_DETECTOR_PROTOCOL_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "cinemeta/error.hpp"
#include "cinemeta/metadata_model.hpp"

namespace cinemeta {

enum class DetectorKind { kFaceDetect, kFaceEmbed, kObjectDetect, kSceneClassify, kOcr, kSlateDetect, kPoseHeight };

inline constexpr std::array<DetectorKind, 7> kAllDetectorKinds = {
    DetectorKind::kFaceDetect,    DetectorKind::kFaceEmbed, DetectorKind::kObjectDetect, DetectorKind::kSceneClassify,
    DetectorKind::kOcr,           DetectorKind::kSlateDetect, DetectorKind::kPoseHeight};

inline std::string_view ToString(DetectorKind k) {
  switch (k) {
    case DetectorKind::kFaceDetect: return "face_detect";
    case DetectorKind::kFaceEmbed: return "face_embed";
    case DetectorKind::kObjectDetect: return "object_detect";
    case DetectorKind::kSceneClassify: return "scene_classify";
    case DetectorKind::kOcr: return "ocr";
    case DetectorKind::kSlateDetect: return "slate_detect";
    case DetectorKind::kPoseHeight: return "pose_height";
  }
  return "";
}

inline std::optional<DetectorKind> DetectorKindFromString(std::string_view s) {
  for (DetectorKind k : kAllDetectorKinds) {
    if (ToString(k) == s) return k;
  }
  return std::nullopt;
}

struct DetectorRequest {
  std::string id;
  DetectorKind kind = DetectorKind::kOcr;
  std::string clip;
  int frame = 0;
  Json payload = Json::object();

  bool operator==(const DetectorRequest&) const = default;
};

struct DetectorResponse {
  std::string id;
  bool ok = false;
  Json result;        // set iff ok
  std::string error;  // set iff !ok

  static DetectorResponse Success(std::string id, Json result) { return {std::move(id), true, std::move(result), ""}; }
  static DetectorResponse Failure(std::string id, std::string error) {
    return {std::move(id), false, nullptr, std::move(error)};
  }
  bool operator==(const DetectorResponse&) const = default;
};

inline Json ToJson(const DetectorRequest& r) {
  return Json{{"id", r.id}, {"kind", ToString(r.kind)}, {"clip", r.clip}, {"frame", r.frame}, {"payload", r.payload}};
}

inline Json ToJson(const DetectorResponse& r) {
  Json j{{"id", r.id}, {"ok", r.ok}};
  if (r.ok) {
    j["result"] = r.result;
  } else {
    j["error"] = r.error;
  }
  return j;
}

namespace detail {

inline Json ParseProtocolLine(std::string_view line, std::string_view what) {
  try {
    Json j = Json::parse(line);
    if (!j.is_object()) Fail(ErrorCode::kProtocolError, std::string(what) + " is not a JSON object");
    return j;
  } catch (const Json::parse_error& e) {
    Fail(ErrorCode::kProtocolError, std::string("malformed ") + std::string(what) + ": " + e.what());
  }
}

template <typename T>
T Field(const Json& j, const char* key, std::string_view what) {
  if (!j.contains(key)) Fail(ErrorCode::kProtocolError, std::string(what) + " lacks '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    Fail(ErrorCode::kProtocolError, std::string(what) + " field '" + key + "' has the wrong type");
  }
}

}  // namespace detail

// Unknown kinds raise UnknownLabel so a server can answer "unsupported
// kind" rather than drop the conversation.
inline DetectorRequest ParseRequest(std::string_view line) {
  const Json j = detail::ParseProtocolLine(line, "request");
  DetectorRequest r;
  r.id = detail::Field<std::string>(j, "id", "request");
  const auto kind = DetectorKindFromString(detail::Field<std::string>(j, "kind", "request"));
  if (!kind) Fail(ErrorCode::kUnknownLabel, "unsupported kind");
  r.kind = *kind;
  r.clip = detail::Field<std::string>(j, "clip", "request");
  r.frame = detail::Field<int>(j, "frame", "request");
  if (j.contains("payload")) {
    if (!j["payload"].is_object()) Fail(ErrorCode::kProtocolError, "request payload is not an object");
    r.payload = j["payload"];
  }
  return r;
}

inline DetectorResponse ParseResponse(std::string_view line) {
  const Json j = detail::ParseProtocolLine(line, "response");
  DetectorResponse r;
  r.id = detail::Field<std::string>(j, "id", "response");
  r.ok = detail::Field<bool>(j, "ok", "response");
  const bool has_result = j.contains("result"), has_error = j.contains("error");
  if (r.ok && (!has_result || has_error)) Fail(ErrorCode::kProtocolError, "ok response must carry only 'result'");
  if (!r.ok && (has_result || !has_error)) Fail(ErrorCode::kProtocolError, "failed response must carry only 'error'");
  if (r.ok) {
    r.result = j["result"];
  } else {
    r.error = detail::Field<std::string>(j, "error", "response");
  }
  return r;
}

// Standard base64 (RFC 4648) for image payloads.
inline std::string Base64Encode(std::string_view bytes) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (std::uint8_t(bytes[i]) << 16) | (std::uint8_t(bytes[i + 1]) << 8) | std::uint8_t(bytes[i + 2]);
    for (int s = 18; s >= 0; s -= 6) out += kAlphabet[(v >> s) & 63];
  }
  if (i < bytes.size()) {
    std::uint32_t v = std::uint8_t(bytes[i]) << 16;
    if (i + 1 < bytes.size()) v |= std::uint8_t(bytes[i + 1]) << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += i + 1 < bytes.size() ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

inline std::string Base64Decode(std::string_view text) {
  auto value = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  if (text.size() % 4) Fail(ErrorCode::kProtocolError, "base64 length is not a multiple of 4");
  std::string out;
  for (std::size_t i = 0; i < text.size(); i += 4) {
    std::uint32_t v = 0;
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=' && i + 4 == text.size() && k >= 2) {
        ++pad;
        v <<= 6;
        continue;
      }
      const int d = value(c);
      if (d < 0 || pad) Fail(ErrorCode::kProtocolError, "invalid base64");
      v = (v << 6) | d;
    }
    out += static_cast<char>((v >> 16) & 255);
    if (pad < 2) out += static_cast<char>((v >> 8) & 255);
    if (pad < 1) out += static_cast<char>(v & 255);
  }
  return out;
}

}  // namespace cinemeta

#endif  // CINEMETA_DETECTOR_PROTOCOL_HPP_
