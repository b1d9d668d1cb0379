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

// Clip manifests: the JSON description of one take's frame sequence and its
// camera-recorded basic metadata.
//
//   {
//     "clip_id": "A001C003", "frames_dir": "A001C003", "frame_pattern": "f%04d.ppm",
//     "frame_count": 48, "fps": 24, "timecode_start": "01:00:00:00",
//     "shutter": 48, "aperture": 2.8, "iso": 800, "focus": 3.5,
//     "frame_start": 0, "bayer_pattern": "RGGB", "lut": "show.cube",
//     "slate_template_id": "board_a", "slate_scan_frames": 48,
//     "scene_num": 12, "shot_num": 3, "take_num": 1, "scene_type": "Inside"
//   }
//
// Relative paths resolve against the manifest's directory.

#ifndef CINEMETA_FORMATS_MANIFEST_HPP_
#define CINEMETA_FORMATS_MANIFEST_HPP_

#include <array>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

#include "cinemeta/image.hpp"
#include "cinemeta/io.hpp"
#include "cinemeta/metadata_model.hpp"

namespace cinemeta {

struct ClipManifest {
  ClipId clip_id;
  fs::path frames_dir;
  std::string frame_pattern;
  int frame_count = 1;
  int frame_start = 0;
  BasicMetadata basic;
  std::optional<std::string> slate_template_id;
  std::optional<int> slate_scan_frames;
  std::optional<BayerPattern> bayer_pattern;
  std::optional<fs::path> lut;
  // Slate numbers as logged on set (camera report / script supervisor).
  std::optional<int> scene_num;
  std::optional<int> shot_num;
  std::optional<int> take_num;
  // Interior/exterior as known from the script.
  std::optional<SceneType> scene_type;

  fs::path FramePath(int index) const {
    std::array<char, 512> buf{};
    const int n = std::snprintf(buf.data(), buf.size(), frame_pattern.c_str(), frame_start + index);
    if (n < 0 || static_cast<std::size_t>(n) >= buf.size()) {
      Fail(ErrorCode::kBadValue, "frame pattern expands to an invalid name");
    }
    return frames_dir / std::string(buf.data(), static_cast<std::size_t>(n));
  }
};

// A printf pattern with exactly one integer conversion (%d, %0Nd) and no
// other conversions besides %%.
inline bool IsValidFramePattern(std::string_view p) {
  int conversions = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] != '%') continue;
    if (i + 1 < p.size() && p[i + 1] == '%') {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < p.size() && p[j] >= '0' && p[j] <= '9') ++j;
    if (j >= p.size() || p[j] != 'd' || j - i > 4) return false;
    ++conversions;
    i = j;
  }
  return conversions == 1 && p.find('/') == std::string_view::npos;
}

inline ClipManifest ManifestFromJson(const Json& j, const fs::path& base_dir = {}) {
  using detail::Require;
  using detail::RequireString;
  if (!j.is_object()) Fail(ErrorCode::kBadType, "manifest: expected an object");
  ClipManifest m;
  const std::string id = RequireString(Require(j, "clip_id", "manifest"), "manifest.clip_id");
  try {
    m.clip_id = ClipId(id);
  } catch (const Error& e) {
    Fail(ErrorCode::kBadType, std::string("manifest.clip_id: ") + e.what());
  }
  const std::string where = "manifest '" + id + "'";
  auto integer = [&](const Json& v, const std::string& key) {
    if (!v.is_number_integer()) Fail(ErrorCode::kBadType, where + "." + key + ": expected an integer");
    return v.get<long long>();
  };
  auto path = [&](const std::string& s) {
    fs::path p(s);
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  };
  m.frames_dir = path(RequireString(Require(j, "frames_dir", where), where + ".frames_dir"));
  m.frame_pattern = RequireString(Require(j, "frame_pattern", where), where + ".frame_pattern");
  if (!IsValidFramePattern(m.frame_pattern)) {
    Fail(ErrorCode::kBadType, where + ".frame_pattern: need exactly one %d-style conversion");
  }
  const long long count = integer(Require(j, "frame_count", where), "frame_count");
  if (count < 1 || count > 1'000'000) Fail(ErrorCode::kBadType, where + ".frame_count: must be >= 1");
  m.frame_count = static_cast<int>(count);
  m.basic = BasicFromJson(j, where);
  auto opt_int = [&](const char* key, long long lo) -> std::optional<int> {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    const long long v = integer(*it, key);
    if (v < lo || v > INT32_MAX) Fail(ErrorCode::kBadType, where + "." + key + ": out of range");
    return static_cast<int>(v);
  };
  m.frame_start = opt_int("frame_start", 0).value_or(0);
  m.slate_scan_frames = opt_int("slate_scan_frames", 1);
  m.scene_num = opt_int("scene_num", 0);
  m.shot_num = opt_int("shot_num", 0);
  m.take_num = opt_int("take_num", 0);
  if (auto it = j.find("slate_template_id"); it != j.end() && !it->is_null()) {
    m.slate_template_id = RequireString(*it, where + ".slate_template_id");
  }
  if (auto it = j.find("bayer_pattern"); it != j.end() && !it->is_null()) {
    auto p = BayerPatternFromString(RequireString(*it, where + ".bayer_pattern"));
    if (!p) Fail(ErrorCode::kBadType, where + ".bayer_pattern: expected RGGB/BGGR/GRBG/GBRG");
    m.bayer_pattern = p;
  }
  if (auto it = j.find("lut"); it != j.end() && !it->is_null()) {
    m.lut = path(RequireString(*it, where + ".lut"));
  }
  if (auto it = j.find("scene_type"); it != j.end() && !it->is_null()) {
    auto t = SceneTypeFromString(RequireString(*it, where + ".scene_type"));
    if (!t) Fail(ErrorCode::kBadType, where + ".scene_type: expected Inside or Outside");
    m.scene_type = t;
  }
  return m;
}

inline ClipManifest ParseManifest(std::string_view text, const fs::path& base_dir = {}) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    Fail(ErrorCode::kBadType, std::string("manifest: malformed JSON: ") + e.what());
  }
  return ManifestFromJson(j, base_dir);
}

inline ClipManifest LoadManifest(const fs::path& path) {
  return ParseManifest(ReadFile(path), path.parent_path());
}

}  // namespace cinemeta

#endif  // CINEMETA_FORMATS_MANIFEST_HPP_
