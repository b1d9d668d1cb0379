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

// Clip metadata schema: camera-recorded basic fields plus the ten semantic
// label classes (slate numbers, camera movement, shot type, actors, time of
// day, scene type, places, objects). Every semantic value carries a
// confidence and the provenance of whoever produced it.

#ifndef CINEMETA_METADATA_MODEL_HPP_
#define CINEMETA_METADATA_MODEL_HPP_

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cinemeta/error.hpp"

namespace cinemeta {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Small text helpers shared by the model and the format writers.

// Shortest decimal text that parses back to exactly `v`.
inline std::string FormatNumber(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) Fail(ErrorCode::kInvalidArgument, "unformattable number");
  return std::string(buf.data(), end);
}

inline std::string_view Trim(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n\f\v";
  const auto first = s.find_first_not_of(kSpace);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(kSpace);
  return s.substr(first, last - first + 1);
}

// Strict non-negative decimal integer: digits only, no sign, no spaces.
inline std::optional<std::int64_t> ParseUnsigned(std::string_view s) {
  if (s.empty() || s.size() > 18) return std::nullopt;
  std::int64_t value = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    value = value * 10 + (c - '0');
  }
  return value;
}

inline std::optional<double> ParseReal(std::string_view s) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

inline bool HasControlChar(std::string_view s) {
  for (unsigned char c : s) {
    if (c < 0x20 || c == 0x7f) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------

class ClipId {
 public:
  ClipId() = default;
  explicit ClipId(std::string value) : value_(std::move(value)) {
    if (value_.empty()) Fail(ErrorCode::kInvalidArgument, "clip id is empty");
    for (char c : value_) {
      if (c == '\t' || c == '\n' || c == '\r' || c == ',') {
        Fail(ErrorCode::kInvalidArgument,
             "clip id '" + value_ + "' contains tab, newline or comma");
      }
    }
  }

  const std::string& str() const noexcept { return value_; }
  bool operator==(const ClipId&) const = default;
  auto operator<=>(const ClipId&) const = default;

 private:
  std::string value_;
};

enum class Provenance { kCamera, kSlateOcr, kAnnotator, kManifest, kManual, kFused };

inline constexpr std::array<Provenance, 6> kAllProvenances = {
    Provenance::kCamera, Provenance::kSlateOcr, Provenance::kAnnotator,
    Provenance::kManifest, Provenance::kManual, Provenance::kFused};

inline std::string_view ToString(Provenance p) {
  switch (p) {
    case Provenance::kCamera: return "camera";
    case Provenance::kSlateOcr: return "slate_ocr";
    case Provenance::kAnnotator: return "annotator";
    case Provenance::kManifest: return "manifest";
    case Provenance::kManual: return "manual";
    case Provenance::kFused: return "fused";
  }
  return "";
}

inline std::optional<Provenance> ProvenanceFromString(std::string_view s) {
  for (Provenance p : kAllProvenances) {
    if (ToString(p) == s) return p;
  }
  return std::nullopt;
}

// A value with confidence in [0,1] and a provenance tag. Camera- and
// manifest-sourced values are facts and must carry confidence 1.
template <typename V>
class Annotated {
 public:
  Annotated(V value, double confidence, Provenance provenance)
      : value_(std::move(value)), confidence_(confidence), provenance_(provenance) {
    if (!(confidence >= 0.0 && confidence <= 1.0)) {
      Fail(ErrorCode::kInvalidArgument,
           "confidence " + FormatNumber(confidence) + " outside [0,1]");
    }
    if ((provenance == Provenance::kCamera || provenance == Provenance::kManifest) &&
        confidence != 1.0) {
      Fail(ErrorCode::kInvalidArgument,
           std::string(ToString(provenance)) + " values must have confidence 1");
    }
  }

  const V& value() const noexcept { return value_; }
  double confidence() const noexcept { return confidence_; }
  Provenance provenance() const noexcept { return provenance_; }

  bool operator==(const Annotated&) const = default;

 private:
  V value_;
  double confidence_;
  Provenance provenance_;
};

// ---------------------------------------------------------------------------
// Timecode

struct Timecode {
  int hh = 0;
  int mm = 0;
  int ss = 0;
  int ff = 0;
  int fps_base = 24;

  bool operator==(const Timecode&) const = default;

  static Timecode Make(int hh, int mm, int ss, int ff, int fps_base) {
    if (fps_base <= 0) Fail(ErrorCode::kBadValue, "timecode fps base must be positive");
    if (hh < 0 || mm < 0 || ss < 0 || ff < 0 || mm >= 60 || ss >= 60 || ff >= fps_base) {
      Fail(ErrorCode::kBadValue, "timecode component out of range");
    }
    return Timecode{hh, mm, ss, ff, fps_base};
  }

  static Timecode Parse(std::string_view text, int fps_base) {
    std::array<int, 4> parts{};
    std::size_t pos = 0;
    for (int i = 0; i < 4; ++i) {
      const std::size_t end = i < 3 ? text.find(':', pos) : text.size();
      if (end == std::string_view::npos) {
        Fail(ErrorCode::kBadValue, "timecode '" + std::string(text) + "' is not HH:MM:SS:FF");
      }
      auto v = ParseUnsigned(text.substr(pos, end - pos));
      if (!v || end - pos < 2) {
        Fail(ErrorCode::kBadValue, "timecode '" + std::string(text) + "' is not HH:MM:SS:FF");
      }
      parts[i] = static_cast<int>(*v);
      pos = end + 1;
    }
    return Make(parts[0], parts[1], parts[2], parts[3], fps_base);
  }

  std::string ToString() const {
    std::string out;
    for (int v : {hh, mm, ss, ff}) {
      if (!out.empty()) out += ':';
      if (v < 10) out += '0';
      out += std::to_string(v);
    }
    return out;
  }
};

// Nominal frame count base for a (possibly fractional) frame rate.
inline int TimecodeBase(double fps) {
  return std::max(1, static_cast<int>(std::lround(fps)));
}

struct BasicMetadata {
  double fps = 24.0;
  std::optional<double> shutter;
  std::optional<double> aperture;
  std::optional<int> iso;
  Timecode timecode_start{};
  std::optional<double> focus;

  bool operator==(const BasicMetadata&) const = default;

  void Validate() const {
    auto positive = [](std::optional<double> v, const char* name) {
      if (v && !(*v > 0.0 && std::isfinite(*v))) {
        Fail(ErrorCode::kBadValue, std::string(name) + " must be positive");
      }
    };
    if (!(fps > 0.0 && std::isfinite(fps))) Fail(ErrorCode::kBadValue, "fps must be positive");
    positive(shutter, "shutter");
    positive(aperture, "aperture");
    positive(focus, "focus");
    if (iso && *iso <= 0) Fail(ErrorCode::kBadValue, "iso must be positive");
    if (timecode_start.fps_base != TimecodeBase(fps)) {
      Fail(ErrorCode::kBadValue, "timecode base does not match fps");
    }
  }
};

// ---------------------------------------------------------------------------
// Semantic vocabularies

enum class CameraMove { kStatic, kPan, kTilt, kTruck, kPedestal, kDolly, kZoom, kHandheld, kUnknown };

inline constexpr std::array<CameraMove, 9> kAllCameraMoves = {
    CameraMove::kStatic, CameraMove::kPan,   CameraMove::kTilt,
    CameraMove::kTruck,  CameraMove::kPedestal, CameraMove::kDolly,
    CameraMove::kZoom,   CameraMove::kHandheld, CameraMove::kUnknown};

inline std::string_view ToString(CameraMove m) {
  switch (m) {
    case CameraMove::kStatic: return "static";
    case CameraMove::kPan: return "pan";
    case CameraMove::kTilt: return "tilt";
    case CameraMove::kTruck: return "truck";
    case CameraMove::kPedestal: return "pedestal";
    case CameraMove::kDolly: return "dolly";
    case CameraMove::kZoom: return "zoom";
    case CameraMove::kHandheld: return "handheld";
    case CameraMove::kUnknown: return "unknown";
  }
  return "";
}

// Ordered broadest to tightest.
enum class ShotType { kFull, kMediumFull, kMedium, kClose, kCloseUp };

inline constexpr std::array<ShotType, 5> kAllShotTypes = {
    ShotType::kFull, ShotType::kMediumFull, ShotType::kMedium, ShotType::kClose,
    ShotType::kCloseUp};

inline std::string_view ToString(ShotType s) {
  switch (s) {
    case ShotType::kFull: return "full";
    case ShotType::kMediumFull: return "medium-full";
    case ShotType::kMedium: return "medium";
    case ShotType::kClose: return "close";
    case ShotType::kCloseUp: return "close-up";
  }
  return "";
}

enum class DayNight { kDay, kNight };

inline constexpr std::array<DayNight, 2> kAllDayNight = {DayNight::kDay, DayNight::kNight};

inline std::string_view ToString(DayNight t) {
  return t == DayNight::kDay ? "Day" : "Night";
}

enum class SceneType { kInside, kOutside };

inline constexpr std::array<SceneType, 2> kAllSceneTypes = {SceneType::kInside,
                                                            SceneType::kOutside};

inline std::string_view ToString(SceneType t) {
  return t == SceneType::kInside ? "Inside" : "Outside";
}

template <typename E, std::size_t N>
std::optional<E> EnumFromString(const std::array<E, N>& all, std::string_view token) {
  for (E e : all) {
    if (ToString(e) == token) return e;
  }
  return std::nullopt;
}

inline std::optional<CameraMove> CameraMoveFromString(std::string_view s) {
  return EnumFromString(kAllCameraMoves, s);
}

// Accepts the hyphenated vocabulary and its snake_case spelling.
inline std::optional<ShotType> ShotTypeFromString(std::string_view s) {
  if (s == "medium_full") return ShotType::kMediumFull;
  if (s == "close_up") return ShotType::kCloseUp;
  return EnumFromString(kAllShotTypes, s);
}

inline std::optional<DayNight> DayNightFromString(std::string_view s) {
  return EnumFromString(kAllDayNight, s);
}

inline std::optional<SceneType> SceneTypeFromString(std::string_view s) {
  return EnumFromString(kAllSceneTypes, s);
}

// Category and pid strings end up inside ';'-joined export cells.
inline bool IsValidToken(std::string_view s) {
  return !s.empty() && !HasControlChar(s) && s.find(';') == std::string_view::npos &&
         Trim(s).size() == s.size();
}

struct ActorPID {
  std::string pid;
  std::optional<std::string> display_name;

  bool operator==(const ActorPID&) const = default;
};

struct SemanticFields {
  std::optional<Annotated<int>> scene_num;
  std::optional<Annotated<int>> shot_num;
  std::optional<Annotated<int>> take_num;
  std::optional<Annotated<CameraMove>> camera_move;
  std::optional<Annotated<ShotType>> shot_type;
  std::vector<Annotated<ActorPID>> actors;
  std::optional<Annotated<DayNight>> time;
  std::optional<Annotated<SceneType>> scene_type;
  std::optional<Annotated<std::string>> places;
  std::vector<Annotated<std::string>> objects;

  bool operator==(const SemanticFields&) const = default;
};

struct MetadataRecord {
  ClipId clip_id;
  BasicMetadata basic;
  SemanticFields semantic;
  std::optional<std::string> notes;
  // Unknown top-level sidecar keys, kept verbatim for forward compatibility.
  Json extras = Json::object();

  bool operator==(const MetadataRecord&) const = default;
};

// ---------------------------------------------------------------------------
// Labels: the user-facing names of exportable/queryable columns.

enum class Label {
  kName,
  kSceneNum,
  kShotNum,
  kTakeNum,
  kCameraMove,
  kShotType,
  kActorPID,
  kTime,
  kSceneType,
  kPlaces,
  kObjectType,
  kNotes,
};

inline constexpr std::array<Label, 12> kAllLabels = {
    Label::kName,     Label::kSceneNum,  Label::kShotNum, Label::kTakeNum,
    Label::kCameraMove, Label::kShotType, Label::kActorPID, Label::kTime,
    Label::kSceneType, Label::kPlaces,   Label::kObjectType, Label::kNotes};

inline std::string_view ToString(Label l) {
  switch (l) {
    case Label::kName: return "Name";
    case Label::kSceneNum: return "SceneNum";
    case Label::kShotNum: return "ShotNum";
    case Label::kTakeNum: return "TakeNum";
    case Label::kCameraMove: return "CameraMove";
    case Label::kShotType: return "ShotType";
    case Label::kActorPID: return "ActorPID";
    case Label::kTime: return "Time";
    case Label::kSceneType: return "SceneType";
    case Label::kPlaces: return "Places";
    case Label::kObjectType: return "ObjectType";
    case Label::kNotes: return "notes";
  }
  return "";
}

inline std::optional<Label> LabelFromString(std::string_view s) {
  return EnumFromString(kAllLabels, s);
}

// Labels holding a list of values; their cells are ';'-joined.
inline bool IsListLabel(Label l) { return l == Label::kActorPID || l == Label::kObjectType; }

// Sidecar key of a semantic label (snake_case of the label name).
inline std::string_view SidecarKey(Label l) {
  switch (l) {
    case Label::kSceneNum: return "scene_num";
    case Label::kShotNum: return "shot_num";
    case Label::kTakeNum: return "take_num";
    case Label::kCameraMove: return "camera_move";
    case Label::kShotType: return "shot_type";
    case Label::kActorPID: return "actors";
    case Label::kTime: return "time";
    case Label::kSceneType: return "scene_type";
    case Label::kPlaces: return "places";
    case Label::kObjectType: return "objects";
    case Label::kName: return "clip_id";
    case Label::kNotes: return "notes";
  }
  return "";
}

// Text of one label for one record as written into an export cell. Absent
// values yield an empty string, never a fabricated default.
inline std::string CellText(const MetadataRecord& r, Label label) {
  const SemanticFields& s = r.semantic;
  auto join = [](const auto& items, auto&& text) {
    std::string out;
    for (const auto& it : items) {
      if (!out.empty()) out += ';';
      out += text(it);
    }
    return out;
  };
  switch (label) {
    case Label::kName: return r.clip_id.str();
    case Label::kSceneNum: return s.scene_num ? std::to_string(s.scene_num->value()) : "";
    case Label::kShotNum: return s.shot_num ? std::to_string(s.shot_num->value()) : "";
    case Label::kTakeNum: return s.take_num ? std::to_string(s.take_num->value()) : "";
    case Label::kCameraMove:
      return s.camera_move ? std::string(ToString(s.camera_move->value())) : "";
    case Label::kShotType: return s.shot_type ? std::string(ToString(s.shot_type->value())) : "";
    case Label::kActorPID:
      return join(s.actors, [](const Annotated<ActorPID>& a) { return a.value().pid; });
    case Label::kTime: return s.time ? std::string(ToString(s.time->value())) : "";
    case Label::kSceneType:
      return s.scene_type ? std::string(ToString(s.scene_type->value())) : "";
    case Label::kPlaces: return s.places ? s.places->value() : "";
    case Label::kObjectType:
      return join(s.objects, [](const Annotated<std::string>& o) { return o.value(); });
    case Label::kNotes: return r.notes.value_or("");
  }
  return "";
}

inline void AppendNote(std::optional<std::string>& notes, std::string_view note) {
  if (notes && !notes->empty()) {
    *notes += "; ";
    *notes += note;
  } else {
    notes = std::string(note);
  }
}

// Inverse of CellText for imported tables. Imported values are manual entries
// (confidence 1). Unparseable cells leave the field absent and add a note.
// Name is handled by the caller since it builds the record identity.
inline void ApplyCell(MetadataRecord& r, Label label, std::string_view cell) {
  SemanticFields& s = r.semantic;
  constexpr Provenance kImported = Provenance::kManual;
  auto reject = [&] {
    AppendNote(r.notes, std::string(ToString(label)) + ": unparseable '" + std::string(cell) + "'");
  };
  if (label == Label::kNotes) {
    if (!cell.empty()) AppendNote(r.notes, cell);
    return;
  }
  if (cell.empty()) return;
  auto number = [&](std::optional<Annotated<int>>& field) {
    auto v = ParseUnsigned(Trim(cell));
    if (v && *v <= INT32_MAX) {
      field.emplace(static_cast<int>(*v), 1.0, kImported);
    } else {
      reject();
    }
  };
  auto enumerated = [&](auto& field, auto parsed) {
    if (parsed) {
      field.emplace(*parsed, 1.0, kImported);
    } else {
      reject();
    }
  };
  auto split = [&](auto&& add) {
    std::size_t pos = 0;
    while (pos <= cell.size()) {
      const std::size_t end = std::min(cell.find(';', pos), cell.size());
      add(cell.substr(pos, end - pos));
      pos = end + 1;
    }
  };
  switch (label) {
    case Label::kSceneNum: number(s.scene_num); break;
    case Label::kShotNum: number(s.shot_num); break;
    case Label::kTakeNum: number(s.take_num); break;
    case Label::kCameraMove: enumerated(s.camera_move, CameraMoveFromString(cell)); break;
    case Label::kShotType: enumerated(s.shot_type, ShotTypeFromString(cell)); break;
    case Label::kTime: enumerated(s.time, DayNightFromString(cell)); break;
    case Label::kSceneType: enumerated(s.scene_type, SceneTypeFromString(cell)); break;
    case Label::kPlaces:
      if (IsValidToken(cell)) {
        s.places.emplace(std::string(cell), 1.0, kImported);
      } else {
        reject();
      }
      break;
    case Label::kActorPID:
      split([&](std::string_view pid) {
        if (IsValidToken(pid)) {
          s.actors.emplace_back(ActorPID{std::string(pid), std::nullopt}, 1.0, kImported);
        } else {
          reject();
        }
      });
      break;
    case Label::kObjectType:
      split([&](std::string_view cat) {
        if (IsValidToken(cat)) {
          s.objects.emplace_back(std::string(cat), 1.0, kImported);
        } else {
          reject();
        }
      });
      break;
    case Label::kName:
    case Label::kNotes: break;
  }
}

// ---------------------------------------------------------------------------
// Canonical JSON sidecar

namespace detail {

template <typename V, typename ToJsonValue>
Json AnnotatedToJson(const Annotated<V>& a, ToJsonValue&& to_value) {
  Json j = Json::object();
  j["value"] = to_value(a.value());
  j["confidence"] = a.confidence();
  j["provenance"] = ToString(a.provenance());
  return j;
}

inline const Json& Require(const Json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) Fail(ErrorCode::kMissingKey, where + ": missing key '" + key + "'");
  return *it;
}

inline double RequireNumber(const Json& j, const std::string& where) {
  if (!j.is_number()) Fail(ErrorCode::kBadType, where + ": expected a number");
  return j.get<double>();
}

inline std::string RequireString(const Json& j, const std::string& where) {
  if (!j.is_string()) Fail(ErrorCode::kBadType, where + ": expected a string");
  return j.get<std::string>();
}

template <typename V, typename FromJsonValue>
Annotated<V> AnnotatedFromJson(const Json& j, const std::string& where, FromJsonValue&& from_value) {
  if (!j.is_object()) Fail(ErrorCode::kBadType, where + ": expected an object");
  V value = from_value(Require(j, "value", where));
  const double confidence = RequireNumber(Require(j, "confidence", where), where + ".confidence");
  const std::string prov = RequireString(Require(j, "provenance", where), where + ".provenance");
  auto p = ProvenanceFromString(prov);
  if (!p) Fail(ErrorCode::kBadValue, where + ": unknown provenance '" + prov + "'");
  try {
    return Annotated<V>(std::move(value), confidence, *p);
  } catch (const Error& e) {
    Fail(ErrorCode::kBadValue, where + ": " + e.what());
  }
}

template <typename E>
auto EnumReader(std::optional<E> (*parse)(std::string_view), std::string where) {
  return [parse, where](const Json& j) {
    const std::string s = RequireString(j, where);
    auto v = parse(s);
    if (!v) Fail(ErrorCode::kBadValue, where + ": '" + s + "' not in vocabulary");
    return *v;
  };
}

inline auto IntReader(std::string where) {
  return [where](const Json& j) {
    if (!j.is_number_integer() || j.get<std::int64_t>() < 0 ||
        j.get<std::int64_t>() > INT32_MAX) {
      Fail(ErrorCode::kBadType, where + ": expected a non-negative integer");
    }
    return j.get<int>();
  };
}

inline auto TokenReader(std::string where) {
  return [where](const Json& j) {
    std::string s = RequireString(j, where);
    if (!IsValidToken(s)) Fail(ErrorCode::kBadValue, where + ": invalid category '" + s + "'");
    return s;
  };
}

}  // namespace detail

inline Json BasicToJson(const BasicMetadata& b) {
  Json j = Json::object();
  j["fps"] = b.fps;
  if (b.shutter) j["shutter"] = *b.shutter;
  if (b.aperture) j["aperture"] = *b.aperture;
  if (b.iso) j["iso"] = *b.iso;
  j["timecode_start"] = b.timecode_start.ToString();
  if (b.focus) j["focus"] = *b.focus;
  return j;
}

// Reads basic camera fields from `j` (an object that may hold other keys too,
// as manifests do). Only fps is required.
inline BasicMetadata BasicFromJson(const Json& j, const std::string& where) {
  using detail::RequireNumber;
  BasicMetadata b;
  b.fps = RequireNumber(detail::Require(j, "fps", where), where + ".fps");
  auto opt_real = [&](const char* key) -> std::optional<double> {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return RequireNumber(*it, where + "." + key);
  };
  b.shutter = opt_real("shutter");
  b.aperture = opt_real("aperture");
  b.focus = opt_real("focus");
  if (auto it = j.find("iso"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) Fail(ErrorCode::kBadType, where + ".iso: expected an integer");
    b.iso = it->get<int>();
  }
  if (!(b.fps > 0.0)) Fail(ErrorCode::kBadType, where + ".fps: must be positive");
  if (auto it = j.find("timecode_start"); it != j.end()) {
    b.timecode_start = Timecode::Parse(detail::RequireString(*it, where + ".timecode_start"),
                                       TimecodeBase(b.fps));
  } else {
    b.timecode_start = Timecode{0, 0, 0, 0, TimecodeBase(b.fps)};
  }
  try {
    b.Validate();
  } catch (const Error& e) {
    Fail(ErrorCode::kBadType, where + ": " + e.what());
  }
  return b;
}

inline Json ToJson(const MetadataRecord& r) {
  using detail::AnnotatedToJson;
  auto id = [](const auto& v) { return Json(v); };
  auto token = [](auto e) { return Json(std::string(ToString(e))); };
  const SemanticFields& s = r.semantic;

  Json sem = Json::object();
  if (s.scene_num) sem["scene_num"] = AnnotatedToJson(*s.scene_num, id);
  if (s.shot_num) sem["shot_num"] = AnnotatedToJson(*s.shot_num, id);
  if (s.take_num) sem["take_num"] = AnnotatedToJson(*s.take_num, id);
  if (s.camera_move) sem["camera_move"] = AnnotatedToJson(*s.camera_move, token);
  if (s.shot_type) sem["shot_type"] = AnnotatedToJson(*s.shot_type, token);
  if (!s.actors.empty()) {
    Json list = Json::array();
    for (const auto& a : s.actors) {
      list.push_back(AnnotatedToJson(a, [](const ActorPID& pid) {
        Json v = Json::object();
        v["pid"] = pid.pid;
        if (pid.display_name) v["display_name"] = *pid.display_name;
        return v;
      }));
    }
    sem["actors"] = std::move(list);
  }
  if (s.time) sem["time"] = AnnotatedToJson(*s.time, token);
  if (s.scene_type) sem["scene_type"] = AnnotatedToJson(*s.scene_type, token);
  if (s.places) sem["places"] = AnnotatedToJson(*s.places, id);
  if (!s.objects.empty()) {
    Json list = Json::array();
    for (const auto& o : s.objects) list.push_back(AnnotatedToJson(o, id));
    sem["objects"] = std::move(list);
  }

  Json j = r.extras.is_object() ? r.extras : Json::object();
  j["clip_id"] = r.clip_id.str();
  j["basic"] = BasicToJson(r.basic);
  j["semantic"] = std::move(sem);
  if (r.notes) j["notes"] = *r.notes;
  return j;
}

inline MetadataRecord RecordFromJson(const Json& j) {
  using detail::AnnotatedFromJson;
  using detail::Require;
  if (!j.is_object()) Fail(ErrorCode::kBadType, "record: expected an object");
  MetadataRecord r;
  const std::string id = detail::RequireString(Require(j, "clip_id", "record"), "record.clip_id");
  try {
    r.clip_id = ClipId(id);
  } catch (const Error& e) {
    Fail(ErrorCode::kBadValue, std::string("record.clip_id: ") + e.what());
  }
  const std::string where = "record '" + id + "'";
  const Json& basic = Require(j, "basic", where);
  if (!basic.is_object()) Fail(ErrorCode::kBadType, where + ".basic: expected an object");
  r.basic = BasicFromJson(basic, where + ".basic");

  const Json& sem = Require(j, "semantic", where);
  if (!sem.is_object()) Fail(ErrorCode::kBadType, where + ".semantic: expected an object");
  SemanticFields& s = r.semantic;
  auto read_int = [&](const char* key, std::optional<Annotated<int>>& field) {
    if (auto it = sem.find(key); it != sem.end()) {
      field.emplace(AnnotatedFromJson<int>(*it, where + "." + key, detail::IntReader(where + "." + key)));
    }
  };
  read_int("scene_num", s.scene_num);
  read_int("shot_num", s.shot_num);
  read_int("take_num", s.take_num);
  if (auto it = sem.find("camera_move"); it != sem.end()) {
    s.camera_move.emplace(AnnotatedFromJson<CameraMove>(
        *it, where + ".camera_move", detail::EnumReader(&CameraMoveFromString, where + ".camera_move")));
  }
  if (auto it = sem.find("shot_type"); it != sem.end()) {
    s.shot_type.emplace(AnnotatedFromJson<ShotType>(
        *it, where + ".shot_type", detail::EnumReader(&ShotTypeFromString, where + ".shot_type")));
  }
  if (auto it = sem.find("time"); it != sem.end()) {
    s.time.emplace(AnnotatedFromJson<DayNight>(
        *it, where + ".time", detail::EnumReader(&DayNightFromString, where + ".time")));
  }
  if (auto it = sem.find("scene_type"); it != sem.end()) {
    s.scene_type.emplace(AnnotatedFromJson<SceneType>(
        *it, where + ".scene_type", detail::EnumReader(&SceneTypeFromString, where + ".scene_type")));
  }
  if (auto it = sem.find("places"); it != sem.end()) {
    s.places.emplace(AnnotatedFromJson<std::string>(*it, where + ".places",
                                                    detail::TokenReader(where + ".places")));
  }
  if (auto it = sem.find("actors"); it != sem.end()) {
    if (!it->is_array()) Fail(ErrorCode::kBadType, where + ".actors: expected an array");
    for (const Json& a : *it) {
      s.actors.push_back(AnnotatedFromJson<ActorPID>(a, where + ".actors", [&](const Json& v) {
        if (!v.is_object()) Fail(ErrorCode::kBadType, where + ".actors: expected an object value");
        ActorPID pid;
        pid.pid = detail::TokenReader(where + ".actors.pid")(Require(v, "pid", where + ".actors"));
        if (auto dn = v.find("display_name"); dn != v.end()) {
          pid.display_name = detail::RequireString(*dn, where + ".actors.display_name");
        }
        return pid;
      }));
    }
  }
  if (auto it = sem.find("objects"); it != sem.end()) {
    if (!it->is_array()) Fail(ErrorCode::kBadType, where + ".objects: expected an array");
    for (const Json& o : *it) {
      s.objects.push_back(
          AnnotatedFromJson<std::string>(o, where + ".objects", detail::TokenReader(where + ".objects")));
    }
  }
  if (auto it = j.find("notes"); it != j.end()) {
    r.notes = detail::RequireString(*it, where + ".notes");
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key != "clip_id" && key != "basic" && key != "semantic" && key != "notes") {
      r.extras[key] = it.value();
    }
  }
  return r;
}

inline std::string SerializeRecord(const MetadataRecord& r) { return ToJson(r).dump(); }

inline MetadataRecord ParseRecord(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    Fail(ErrorCode::kBadType, std::string("record: malformed JSON: ") + e.what());
  }
  return RecordFromJson(j);
}

}  // namespace cinemeta

#endif  // CINEMETA_METADATA_MODEL_HPP_
