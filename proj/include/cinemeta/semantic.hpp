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

#ifndef CINEMETA_SEMANTIC_HPP_
#define CINEMETA_SEMANTIC_HPP_

// Shot scale, actor identity, day/night and scene/object labels. Models
// live behind the detector bridge; this file holds the decision rules.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cinemeta/detector/client.hpp"
#include "cinemeta/detector/results.hpp"
#include "cinemeta/formats/raster.hpp"
#include "cinemeta/geometry/types.hpp"
#include "cinemeta/image.hpp"
#include "cinemeta/imaging.hpp"
#include "cinemeta/io.hpp"
#include "cinemeta/metadata_model.hpp"

namespace cinemeta {

// ---------------------------------------------------------------------------
// Shot scale

struct FaceObservation {
  int frame_index = 0;
  Rect box;
  std::optional<std::vector<double>> embedding;  // unit norm when present
  double confidence = 0.0;
};

struct ScaleConfig {
  // Face height / frame height.
  std::array<double, 4> face_breaks = {0.05, 0.10, 0.20, 0.35};
  // Extrapolated full-body height / frame height. A body several frames
  // tall means only part of it is in shot, so larger is tighter here too.
  std::array<double, 4> body_breaks = {1.0, 1.4, 2.2, 3.5};

  void Validate() const {
    for (const auto* breaks : {&face_breaks, &body_breaks}) {
      for (std::size_t i = 0; i < breaks->size(); ++i) {
        if (!std::isfinite((*breaks)[i]) || (*breaks)[i] < 0 || (i > 0 && !((*breaks)[i] > (*breaks)[i - 1])))
          Fail(ErrorCode::kConfig, "shot scale breaks must be finite, non-negative and strictly increasing");
      }
    }
  }

  static ScaleConfig FromJson(const Json& j) {
    ScaleConfig c;
    if (j.contains("face_breaks")) c.face_breaks = j.at("face_breaks").get<std::array<double, 4>>();
    if (j.contains("body_breaks")) c.body_breaks = j.at("body_breaks").get<std::array<double, 4>>();
    c.Validate();
    return c;
  }
};

// r < b1 -> full, [b1,b2) -> medium-full, ..., r >= b4 -> close-up.
inline ShotType ScaleBand(double ratio, const std::array<double, 4>& breaks) {
  std::size_t i = 0;
  while (i < breaks.size() && ratio >= breaks[i]) ++i;
  return kAllShotTypes[i];
}

// The tallest face box decides (first one on ties); with no face, the
// pose-derived body height does at half the pose confidence.
inline Annotated<ShotType> EstimateShotScale(std::span<const FaceObservation> faces,
                                            const std::optional<PoseHeight>& pose, int frame_height,
                                            const ScaleConfig& cfg = {}) {
  if (frame_height <= 0) Fail(ErrorCode::kInvalidArgument, "frame height must be positive");
  if (!faces.empty()) {
    const FaceObservation* largest = &faces.front();
    for (const FaceObservation& f : faces) {
      if (f.box.h > largest->box.h) largest = &f;
    }
    return {ScaleBand(largest->box.h / frame_height, cfg.face_breaks), largest->confidence, Provenance::kAnnotator};
  }
  if (pose) {
    return {ScaleBand(pose->height_px / frame_height, cfg.body_breaks), 0.5 * pose->confidence,
            Provenance::kAnnotator};
  }
  Fail(ErrorCode::kNoSubject, "no face or body height to judge shot scale from");
}

// ---------------------------------------------------------------------------
// Actor identity

struct GalleryEntry {
  std::string pid;
  std::optional<std::string> display_name;
  std::vector<double> embedding;
};

struct ActorGallery {
  std::vector<GalleryEntry> entries;
  double similarity_threshold = 0.5;

  std::size_t dimension() const { return entries.empty() ? 0 : entries.front().embedding.size(); }

  void Validate() const {
    if (!(similarity_threshold > 0.0 && similarity_threshold < 1.0))
      Fail(ErrorCode::kConfig, "similarity threshold must lie in (0,1)");
    std::set<std::string> pids;
    for (const GalleryEntry& e : entries) {
      if (!IsValidToken(e.pid)) Fail(ErrorCode::kBadValue, "gallery pid '" + e.pid + "' is not a valid token");
      if (!pids.insert(e.pid).second) Fail(ErrorCode::kBadValue, "duplicate gallery pid '" + e.pid + "'");
      if (e.embedding.empty() || e.embedding.size() != dimension())
        Fail(ErrorCode::kDimensionMismatch, "gallery embeddings must share one non-zero dimension");
    }
  }
};

namespace detail {

inline double L2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Scales to unit length; a zero or non-finite vector has no direction.
inline std::vector<double> Normalised(std::vector<double> v, const std::string& what) {
  const double n = L2(v);
  if (!(n > 0.0) || !std::isfinite(n)) Fail(ErrorCode::kBadValue, what + " has no direction");
  for (double& x : v) x /= n;
  return v;
}

}  // namespace detail

// [{pid, display_name, embedding}]; embeddings are normalised on load.
inline ActorGallery GalleryFromJson(const Json& j, double threshold = 0.5) {
  if (!j.is_array()) Fail(ErrorCode::kBadType, "actor gallery must be a list");
  ActorGallery g;
  g.similarity_threshold = threshold;
  for (const Json& item : j) {
    if (!item.is_object() || !item.contains("pid") || !item.contains("embedding"))
      Fail(ErrorCode::kMissingKey, "gallery entries need 'pid' and 'embedding'");
    GalleryEntry e;
    try {
      e.pid = item["pid"].get<std::string>();
      if (item.contains("display_name") && !item["display_name"].is_null())
        e.display_name = item["display_name"].get<std::string>();
      e.embedding = detail::Normalised(item["embedding"].get<std::vector<double>>(), "embedding of '" + e.pid + "'");
    } catch (const Json::exception& ex) {
      Fail(ErrorCode::kBadType, std::string("actor gallery: ") + ex.what());
    }
    g.entries.push_back(std::move(e));
  }
  g.Validate();
  return g;
}

inline ActorGallery LoadGallery(const fs::path& path, double threshold = 0.5) {
  try {
    return GalleryFromJson(Json::parse(ReadFile(path)), threshold);
  } catch (const Json::parse_error& e) {
    Fail(ErrorCode::kBadType, path.string() + ": " + e.what());
  }
}

struct ActorMatch {
  const GalleryEntry* entry = nullptr;
  double similarity = 0.0;
};

// Cosine argmax over the gallery; earlier entries win ties. None when the
// best similarity is below the threshold.
inline std::optional<ActorMatch> MatchActor(std::span<const double> embedding, const ActorGallery& gallery) {
  if (gallery.entries.empty()) return std::nullopt;
  if (embedding.size() != gallery.dimension())
    Fail(ErrorCode::kDimensionMismatch, "embedding has " + std::to_string(embedding.size()) +
                                            " dimensions, gallery has " + std::to_string(gallery.dimension()));
  const double qn = detail::L2(embedding);
  if (!(qn > 0.0)) Fail(ErrorCode::kBadValue, "query embedding has no direction");
  ActorMatch best;
  for (const GalleryEntry& e : gallery.entries) {
    double dot = 0.0;
    for (std::size_t i = 0; i < embedding.size(); ++i) dot += embedding[i] * e.embedding[i];
    const double sim = dot / (qn * detail::L2(e.embedding));
    if (!best.entry || sim > best.similarity) best = {&e, sim};
  }
  if (best.similarity < gallery.similarity_threshold) return std::nullopt;
  best.similarity = std::min(best.similarity, 1.0);
  return best;
}

// One entry per matched pid, in gallery order, carrying its best similarity.
inline std::vector<Annotated<ActorPID>> IdentifyActors(std::span<const FaceObservation> faces,
                                                       const ActorGallery& gallery) {
  std::map<const GalleryEntry*, double> best;
  for (const FaceObservation& f : faces) {
    if (!f.embedding) continue;
    if (const auto m = MatchActor(*f.embedding, gallery)) {
      auto [it, fresh] = best.try_emplace(m->entry, m->similarity);
      if (!fresh) it->second = std::max(it->second, m->similarity);
    }
  }
  std::vector<Annotated<ActorPID>> out;
  for (const GalleryEntry& e : gallery.entries) {
    if (auto it = best.find(&e); it != best.end())
      out.emplace_back(ActorPID{e.pid, e.display_name}, it->second, Provenance::kAnnotator);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Day / night

struct DayNightConfig {
  double night_below = 0.25;  // mean HSV value
  double day_from = 0.40;
  double blue_ratio = 1.15;  // in between: night when mean B > ratio * mean R
  double inside_factor = 0.7;

  static DayNightConfig FromJson(const Json& j) {
    DayNightConfig c;
    if (j.contains("night_below")) c.night_below = j.at("night_below").get<double>();
    if (j.contains("day_from")) c.day_from = j.at("day_from").get<double>();
    if (j.contains("blue_ratio")) c.blue_ratio = j.at("blue_ratio").get<double>();
    if (j.contains("inside_factor")) c.inside_factor = j.at("inside_factor").get<double>();
    if (!(c.night_below <= c.day_from)) Fail(ErrorCode::kConfig, "day_night.night_below must not exceed day_from");
    if (!(c.inside_factor >= 0.0 && c.inside_factor <= 1.0))
      Fail(ErrorCode::kConfig, "day_night.inside_factor must lie in [0,1]");
    return c;
  }
};

struct FrameLight {
  double value = 0.0;  // mean HSV value
  double red = 0.0;
  double blue = 0.0;
};

inline FrameLight MeasureLight(const Image& img) {
  FrameLight m;
  const std::size_t n = static_cast<std::size_t>(img.width()) * img.height();
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const double r = img.at(x, y, 0);
      const double g = img.channels() == 3 ? img.at(x, y, 1) : r;
      const double b = img.channels() == 3 ? img.at(x, y, 2) : r;
      m.value += RgbToHsv(r, g, b).v;
      m.red += r;
      m.blue += b;
    }
  }
  m.value /= n;
  m.red /= n;
  m.blue /= n;
  return m;
}

inline DayNight FrameVote(const FrameLight& m, const DayNightConfig& cfg = {}) {
  if (m.value < cfg.night_below) return DayNight::kNight;
  if (m.value >= cfg.day_from) return DayNight::kDay;
  return m.blue > cfg.blue_ratio * m.red ? DayNight::kNight : DayNight::kDay;
}

// Majority of per-frame votes; an even split reads as day. An interior
// prior only lowers confidence.
inline Annotated<DayNight> ClassifyDayNight(std::span<const Image> frames, std::optional<SceneType> prior,
                                           const DayNightConfig& cfg = {}) {
  if (frames.empty()) Fail(ErrorCode::kInvalidArgument, "day/night needs at least one frame");
  std::size_t night = 0;
  for (const Image& f : frames) night += FrameVote(MeasureLight(f), cfg) == DayNight::kNight;
  const std::size_t day = frames.size() - night;
  const DayNight label = night > day ? DayNight::kNight : DayNight::kDay;
  double confidence = static_cast<double>(std::max(night, day)) / static_cast<double>(frames.size());
  if (prior == SceneType::kInside) confidence *= cfg.inside_factor;
  return {label, confidence, Provenance::kAnnotator};
}

// ---------------------------------------------------------------------------
// Detector-backed annotators

// {width, height, image: base64 PGM/PPM} for a frame or crop.
inline Json ImagePayload(const Image& img) {
  return {{"width", img.width()}, {"height", img.height()}, {"image", Base64Encode(SerializeRaster(FromImage(img)))}};
}

struct SampledFrame {
  int index = 0;  // frame number within the clip
  Image image;
};

struct SceneObjectConfig {
  double object_fraction = 0.3;
};

struct SceneObjects {
  std::optional<Annotated<SceneType>> scene_type;
  std::optional<Annotated<std::string>> places;
  std::vector<Annotated<std::string>> objects;
};

namespace detail {

// Highest weight wins; map order breaks ties.
template <typename K>
std::optional<std::pair<K, double>> TopVote(const std::map<K, double>& votes, double total) {
  if (votes.empty() || !(total > 0.0)) return std::nullopt;
  auto best = votes.begin();
  for (auto it = votes.begin(); it != votes.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return std::pair<K, double>{best->first, std::min(best->second / total, 1.0)};
}

}  // namespace detail

// Confidence-weighted votes over the sampled frames. scene_type and places
// carry the winner's share of the vote weight; an object is kept when its
// summed confidence (best per frame) exceeds object_fraction x frames.
inline SceneObjects AnnotateSceneObjects(DetectorClient& client, const std::string& clip,
                                         std::span<const SampledFrame> frames, const SceneObjectConfig& cfg = {}) {
  const bool scenes = client.Supports(DetectorKind::kSceneClassify);
  const bool objects = client.Supports(DetectorKind::kObjectDetect);
  if (!scenes && !objects) Fail(ErrorCode::kDetectorUnavailable, "no scene_classify or object_detect backend");
  std::map<SceneType, double> type_votes;
  std::map<std::string, double> place_votes;
  std::map<std::string, double> object_weight;
  double total = 0.0;
  for (const SampledFrame& f : frames) {
    const Json payload = ImagePayload(f.image);
    if (scenes) {
      const DetectorResponse r = client.Call(DetectorKind::kSceneClassify, clip, f.index, payload);
      if (r.ok) {
        const SceneResult s = ParseScene(r.result);
        type_votes[s.scene_type] += s.confidence;
        place_votes[s.place] += s.confidence;
        total += s.confidence;
      }
    }
    if (objects) {
      const DetectorResponse r = client.Call(DetectorKind::kObjectDetect, clip, f.index, payload);
      if (r.ok) {
        std::map<std::string, double> in_frame;
        for (const Category& c : ParseCategories(r.result)) {
          double& w = in_frame[c.category];
          w = std::max(w, c.confidence);
        }
        for (const auto& [name, w] : in_frame) object_weight[name] += w;
      }
    }
  }
  SceneObjects out;
  if (const auto top = detail::TopVote(type_votes, total))
    out.scene_type.emplace(top->first, top->second, Provenance::kAnnotator);
  if (const auto top = detail::TopVote(place_votes, total)) {
    if (IsValidToken(top->first)) out.places.emplace(top->first, top->second, Provenance::kAnnotator);
  }
  const double n = static_cast<double>(frames.size());
  std::vector<std::pair<std::string, double>> kept;
  for (const auto& [name, w] : object_weight) {
    if (w > cfg.object_fraction * n && IsValidToken(name)) kept.emplace_back(name, std::min(w / n, 1.0));
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  for (const auto& [name, c] : kept) out.objects.emplace_back(name, c, Provenance::kAnnotator);
  return out;
}

// Faces on every sampled frame, with embeddings when face_embed is
// available. Boxes are clipped to the frame; empty ones are dropped.
inline std::vector<FaceObservation> DetectFaces(DetectorClient& client, const std::string& clip,
                                                std::span<const SampledFrame> frames) {
  if (!client.Supports(DetectorKind::kFaceDetect)) Fail(ErrorCode::kDetectorUnavailable, "no face_detect backend");
  const bool embed = client.Supports(DetectorKind::kFaceEmbed);
  std::vector<FaceObservation> faces;
  for (const SampledFrame& f : frames) {
    const DetectorResponse r = client.Call(DetectorKind::kFaceDetect, clip, f.index, ImagePayload(f.image));
    if (!r.ok) continue;
    for (const DetectedBox& d : ParseBoxes(r.result, DetectorKind::kFaceDetect)) {
      const double x0 = std::clamp(d.box.x, 0.0, double(f.image.width()));
      const double y0 = std::clamp(d.box.y, 0.0, double(f.image.height()));
      const double x1 = std::clamp(d.box.x + d.box.w, 0.0, double(f.image.width()));
      const double y1 = std::clamp(d.box.y + d.box.h, 0.0, double(f.image.height()));
      if (!(x1 > x0 && y1 > y0)) continue;
      FaceObservation face{f.index, {x0, y0, x1 - x0, y1 - y0}, std::nullopt, d.confidence};
      if (embed) {
        const int cx = static_cast<int>(x0), cy = static_cast<int>(y0);
        const int cw = std::max(1, static_cast<int>(std::ceil(x1)) - cx);
        const int ch = std::max(1, static_cast<int>(std::ceil(y1)) - cy);
        Image crop(cw, ch, f.image.channels());
        for (int y = 0; y < ch; ++y) {
          for (int x = 0; x < cw; ++x) {
            for (int c = 0; c < crop.channels(); ++c) crop.at(x, y, c) = f.image.clamped(cx + x, cy + y, c);
          }
        }
        Json payload = ImagePayload(crop);
        payload["box"] = {face.box.x, face.box.y, face.box.w, face.box.h};
        const DetectorResponse e = client.Call(DetectorKind::kFaceEmbed, clip, f.index, payload);
        if (e.ok) {
          try {
            face.embedding = detail::Normalised(ParseEmbedding(e.result), "face embedding");
          } catch (const Error& err) {
            if (err.code() != ErrorCode::kBadValue) throw;
            Fail(ErrorCode::kProtocolError, std::string("face_embed result: ") + err.what());
          }
        }
      }
      faces.push_back(std::move(face));
    }
  }
  return faces;
}

// The most confident body-height reading across frames (earliest on ties).
inline std::optional<PoseHeight> MeasurePoseHeight(DetectorClient& client, const std::string& clip,
                                                   std::span<const SampledFrame> frames) {
  if (!client.Supports(DetectorKind::kPoseHeight)) return std::nullopt;
  std::optional<PoseHeight> best;
  for (const SampledFrame& f : frames) {
    const DetectorResponse r = client.Call(DetectorKind::kPoseHeight, clip, f.index, ImagePayload(f.image));
    if (!r.ok) continue;
    const PoseHeight p = ParsePoseHeight(r.result);
    if (!best || p.confidence > best->confidence) best = p;
  }
  return best;
}

}  // namespace cinemeta

#endif  // CINEMETA_SEMANTIC_HPP_
