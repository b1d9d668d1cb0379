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

// Typed views of the kind-specific result payloads. Shape violations are
// protocol errors: a backend answered, but not in the published schema.

#ifndef CINEMETA_DETECTOR_RESULTS_HPP_
#define CINEMETA_DETECTOR_RESULTS_HPP_

#include <algorithm>
#include <string>
#include <vector>

#include "cinemeta/detector/protocol.hpp"
#include "cinemeta/geometry/types.hpp"

namespace cinemeta {

struct DetectedBox {
  Rect box;
  double confidence = 0.0;
};

struct Category {
  std::string category;
  double confidence = 0.0;
};

struct SceneResult {
  SceneType scene_type = SceneType::kInside;
  std::string place;
  double confidence = 0.0;
};

struct OcrResult {
  std::string text;
  double confidence = 0.0;
};

struct PoseHeight {
  double height_px = 0.0;
  double confidence = 0.0;
};

namespace detail {

[[noreturn]] inline void BadResult(DetectorKind kind, const std::string& why) {
  Fail(ErrorCode::kProtocolError, std::string(ToString(kind)) + " result: " + why);
}

inline double Confidence(const Json& j, DetectorKind kind) {
  if (!j.contains("confidence") || !j["confidence"].is_number()) BadResult(kind, "missing numeric 'confidence'");
  const double c = j["confidence"].get<double>();
  if (!(c >= 0.0 && c <= 1.0)) BadResult(kind, "confidence outside [0,1]");
  return c;
}

inline std::string String(const Json& j, const char* key, DetectorKind kind) {
  if (!j.contains(key) || !j[key].is_string()) BadResult(kind, std::string("missing string '") + key + "'");
  return j[key].get<std::string>();
}

inline const Json& List(const Json& result, DetectorKind kind) {
  if (!result.is_array()) BadResult(kind, "expected a list");
  return result;
}

inline const Json& Object(const Json& result, DetectorKind kind) {
  if (!result.is_object()) BadResult(kind, "expected an object");
  return result;
}

}  // namespace detail

// face_detect and slate_detect: [{box: [x, y, w, h], confidence}]
inline std::vector<DetectedBox> ParseBoxes(const Json& result, DetectorKind kind) {
  std::vector<DetectedBox> out;
  for (const Json& item : detail::List(result, kind)) {
    detail::Object(item, kind);
    const Json& b = item.contains("box") ? item["box"] : Json();
    if (!b.is_array() || b.size() != 4 || !std::all_of(b.begin(), b.end(), [](const Json& v) { return v.is_number(); }))
      detail::BadResult(kind, "box must be [x, y, w, h]");
    DetectedBox d{{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()},
                  detail::Confidence(item, kind)};
    if (!(d.box.w >= 0 && d.box.h >= 0)) detail::BadResult(kind, "box has negative size");
    out.push_back(d);
  }
  return out;
}

// face_embed: {embedding: [...]}
inline std::vector<double> ParseEmbedding(const Json& result) {
  const DetectorKind kind = DetectorKind::kFaceEmbed;
  const Json& e = detail::Object(result, kind).contains("embedding") ? result["embedding"] : Json();
  if (!e.is_array() || e.empty()) detail::BadResult(kind, "embedding must be a non-empty list");
  std::vector<double> v;
  for (const Json& x : e) {
    if (!x.is_number()) detail::BadResult(kind, "embedding entries must be numbers");
    v.push_back(x.get<double>());
  }
  return v;
}

// object_detect: [{category, confidence}]
inline std::vector<Category> ParseCategories(const Json& result) {
  const DetectorKind kind = DetectorKind::kObjectDetect;
  std::vector<Category> out;
  for (const Json& item : detail::List(result, kind)) {
    detail::Object(item, kind);
    out.push_back({detail::String(item, "category", kind), detail::Confidence(item, kind)});
  }
  return out;
}

// scene_classify: {scene_type: "Inside"|"Outside", place, confidence}
inline SceneResult ParseScene(const Json& result) {
  const DetectorKind kind = DetectorKind::kSceneClassify;
  detail::Object(result, kind);
  const auto st = SceneTypeFromString(detail::String(result, "scene_type", kind));
  if (!st) detail::BadResult(kind, "scene_type must be Inside or Outside");
  return {*st, detail::String(result, "place", kind), detail::Confidence(result, kind)};
}

// ocr: {text, confidence}
inline OcrResult ParseOcr(const Json& result) {
  const DetectorKind kind = DetectorKind::kOcr;
  detail::Object(result, kind);
  return {detail::String(result, "text", kind), detail::Confidence(result, kind)};
}

// pose_height: {height_px, confidence}
inline PoseHeight ParsePoseHeight(const Json& result) {
  const DetectorKind kind = DetectorKind::kPoseHeight;
  detail::Object(result, kind);
  if (!result.contains("height_px") || !result["height_px"].is_number() || result["height_px"].get<double>() < 0)
    detail::BadResult(kind, "height_px must be a non-negative number");
  return {result["height_px"].get<double>(), detail::Confidence(result, kind)};
}

}  // namespace cinemeta

#endif  // CINEMETA_DETECTOR_RESULTS_HPP_
