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

// Slate reading: align a frame to a registered slate template, then crop
// each template region out of the frame and hand it to the OCR backend.

#ifndef CINEMETA_SLATE_HPP_
#define CINEMETA_SLATE_HPP_

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cinemeta/detector/client.hpp"
#include "cinemeta/detector/results.hpp"
#include "cinemeta/formats/raster.hpp"
#include "cinemeta/geometry/corners.hpp"
#include "cinemeta/geometry/descriptors.hpp"
#include "cinemeta/geometry/transform.hpp"
#include "cinemeta/geometry/warp.hpp"
#include "cinemeta/imaging.hpp"
#include "cinemeta/io.hpp"

namespace cinemeta {

enum class ValueKind { kInteger, kText };

inline std::string_view ToString(ValueKind k) { return k == ValueKind::kInteger ? "integer" : "text"; }

struct SlateRegion {
  std::string name;
  Rect rect;
  ValueKind value_kind = ValueKind::kText;
};

struct SlateTemplate {
  std::string template_id;
  Image image;  // grayscale
  std::vector<SlateRegion> regions;

  const SlateRegion* Find(std::string_view name) const {
    for (const SlateRegion& r : regions) {
      if (r.name == name) return &r;
    }
    return nullptr;
  }

  void Validate() const {
    if (image.channels() != 1) Fail(ErrorCode::kChannelMismatch, "slate template image must be grayscale");
    std::set<std::string> names;
    for (const SlateRegion& r : regions) {
      if (r.name.empty()) Fail(ErrorCode::kBadValue, "slate region without a name");
      if (!names.insert(r.name).second) Fail(ErrorCode::kBadValue, "duplicate slate region '" + r.name + "'");
      if (!(r.rect.w >= 1 && r.rect.h >= 1 && r.rect.x >= 0 && r.rect.y >= 0 && r.rect.x + r.rect.w <= image.width() &&
            r.rect.y + r.rect.h <= image.height()))
        Fail(ErrorCode::kBadValue, "slate region '" + r.name + "' lies outside the template image");
    }
  }
};

// [{"name", "rect": [x, y, w, h], "value_kind": "integer"|"text"}]
inline std::vector<SlateRegion> ParseRegions(const Json& j) {
  if (!j.is_array()) Fail(ErrorCode::kBadType, "slate regions must be a list");
  std::vector<SlateRegion> out;
  for (const Json& item : j) {
    if (!item.is_object() || !item.contains("name") || !item.contains("rect"))
      Fail(ErrorCode::kMissingKey, "slate region needs 'name' and 'rect'");
    const Json& rc = item["rect"];
    if (!rc.is_array() || rc.size() != 4) Fail(ErrorCode::kBadType, "slate region rect must be [x, y, w, h]");
    SlateRegion r;
    r.name = item["name"].get<std::string>();
    r.rect = {rc[0].get<double>(), rc[1].get<double>(), rc[2].get<double>(), rc[3].get<double>()};
    const std::string kind = item.value("value_kind", "text");
    if (kind != "integer" && kind != "text") Fail(ErrorCode::kBadValue, "value_kind must be integer or text");
    r.value_kind = kind == "integer" ? ValueKind::kInteger : ValueKind::kText;
    out.push_back(std::move(r));
  }
  return out;
}

inline Json RegionsToJson(std::span<const SlateRegion> regions) {
  Json j = Json::array();
  for (const SlateRegion& r : regions) {
    j.push_back({{"name", r.name}, {"rect", {r.rect.x, r.rect.y, r.rect.w, r.rect.h}}, {"value_kind", ToString(r.value_kind)}});
  }
  return j;
}

// `<dir>/<id>.ppm` (or .pgm) plus `<dir>/<id>.regions.json`.
inline SlateTemplate LoadTemplate(const fs::path& dir, const std::string& id) {
  SlateTemplate t;
  t.template_id = id;
  fs::path image = dir / (id + ".ppm");
  if (!fs::exists(image)) image = dir / (id + ".pgm");
  Image img = LoadImage(image);
  t.image = img.channels() == 3 ? ToGrayscale(img) : img;
  try {
    t.regions = ParseRegions(Json::parse(ReadFile(dir / (id + ".regions.json"))));
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kBadType, "slate regions for '" + id + "': " + e.what());
  }
  t.Validate();
  return t;
}

inline void SaveTemplate(const SlateTemplate& t, const fs::path& dir) {
  fs::create_directories(dir);
  SaveImage(t.image, dir / (t.template_id + ".pgm"));
  WriteFileAtomic(dir / (t.template_id + ".regions.json"), RegionsToJson(t.regions).dump(2) + "\n");
}

// Loads templates on first use; safe to share between workers.
class TemplateRegistry {
 public:
  explicit TemplateRegistry(fs::path dir) : dir_(std::move(dir)) {}

  std::shared_ptr<const SlateTemplate> Get(const std::string& id) {
    std::lock_guard lock(mu_);
    auto it = cache_.find(id);
    if (it == cache_.end()) it = cache_.emplace(id, std::make_shared<SlateTemplate>(LoadTemplate(dir_, id))).first;
    return it->second;
  }

 private:
  fs::path dir_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const SlateTemplate>> cache_;
};

struct SlateConfig {
  int min_inliers = 15;
  int scan_frames = 48;
  int max_corners = 500;
  double corner_min_distance = 3.0;
  double corner_quality = 0.01;
  double match_ratio = 0.85;
  int ransac_iterations = 1000;
  double inlier_threshold = 2.0;
  std::uint64_t seed = 0;
  // Descriptors are neither scale nor rotation invariant, so the template
  // is described at each of these scales and rotations (degrees).
  std::vector<double> view_scales = {0.7, 0.85, 1.0, 1.2};
  std::vector<double> view_rotations = {-6.0, 0.0, 6.0};

  static SlateConfig FromJson(const Json& j) {
    SlateConfig c;
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    };
    get("min_inliers", c.min_inliers);
    get("scan_frames", c.scan_frames);
    get("max_corners", c.max_corners);
    get("match_ratio", c.match_ratio);
    get("ransac_iterations", c.ransac_iterations);
    get("inlier_threshold", c.inlier_threshold);
    get("view_scales", c.view_scales);
    get("view_rotations", c.view_rotations);
    if (c.view_scales.empty() || c.view_rotations.empty())
      Fail(ErrorCode::kConfig, "slate.view_scales and slate.view_rotations must be non-empty");
    for (double v : c.view_scales) {
      if (!(v > 0)) Fail(ErrorCode::kConfig, "slate.view_scales must be positive");
    }
    if (c.min_inliers < 4) Fail(ErrorCode::kConfig, "slate.min_inliers must be at least 4");
    return c;
  }
};

struct FieldReading {
  std::string raw_text;
  std::optional<int> parsed;
  double confidence = 0.0;
};

struct SlateReading {
  int frame_index = 0;
  TransformModel homography;  // frame -> template
  int alignment_inliers = 0;
  double alignment_confidence = 0.0;  // inlier fraction of the matches
  std::map<std::string, FieldReading> fields;
};

// Template descriptors are computed once and reused for every frame.
struct PreparedTemplate {
  struct View {
    double scale = 1.0;
    double rotation = 0.0;
    std::vector<Descriptor> descriptors;  // centres in template coordinates
  };
  const SlateTemplate* tpl = nullptr;
  std::vector<View> views;

  PreparedTemplate(const SlateTemplate& t, const SlateConfig& c) : tpl(&t) {
    double fill = 0.0;
    for (double v : t.image.data()) fill += v;
    fill /= static_cast<double>(t.image.data().size());
    const double w = t.image.width(), h = t.image.height();
    for (double s : c.view_scales) {
      for (double deg : c.view_rotations) {
        const double th = deg * std::numbers::pi / 180.0;
        // Bounding box of the rotated, scaled template.
        const double vw = s * (w * std::abs(std::cos(th)) + h * std::abs(std::sin(th)));
        const double vh = s * (w * std::abs(std::sin(th)) + h * std::abs(std::cos(th)));
        const int iw = static_cast<int>(std::ceil(vw)) + 2, ih = static_cast<int>(std::ceil(vh)) + 2;
        Eigen::Matrix3d to_view = TransformModel::Similarity(s, th, iw / 2.0, ih / 2.0).matrix;
        Eigen::Matrix3d centre = Eigen::Matrix3d::Identity();
        centre(0, 2) = -w / 2.0;
        centre(1, 2) = -h / 2.0;
        to_view = to_view * centre;
        const Eigen::Matrix3d to_template = to_view.inverse();
        const Image view = WarpImage(t.image, to_template, iw, ih, fill);
        View v{s, deg, ComputeDescriptors(view, DetectCorners(view, c.max_corners, c.corner_min_distance,
                                                              c.corner_quality))};
        for (Descriptor& d : v.descriptors) {
          const Point2 p = ApplyMatrix(to_template, d.center.position());
          d.center.x = p.x;
          d.center.y = p.y;
        }
        views.push_back(std::move(v));
      }
    }
  }
};

struct Alignment {
  TransformModel homography;  // frame -> template
  int matches = 0;
  int inliers() const { return static_cast<int>(homography.inliers.size()); }
  double inlier_fraction() const { return matches ? static_cast<double>(inliers()) / matches : 0.0; }
};

// Polishes the matrix with agreeing matches from every template view, one
// per frame corner. The inlier set, and so the acceptance test, stays that
// of the winning view; only the geometry improves.
inline void RefineWithPooledMatches(TransformModel& model, std::span<const PointMatch> pooled, double threshold) {
  for (int round = 0; round < 2; ++round) {
    std::map<std::pair<double, double>, std::pair<double, PointMatch>> by_corner;
    for (const PointMatch& m : pooled) {
      const double r = Norm(ApplyMatrix(model.matrix, m.a) - m.b);
      if (r > threshold) continue;
      auto [it, fresh] = by_corner.try_emplace({m.a.x, m.a.y}, r, m);
      if (!fresh && r < it->second.first) it->second = {r, m};
    }
    std::vector<PointMatch> agreeing;
    for (const auto& [key, entry] : by_corner) agreeing.push_back(entry.second);
    if (agreeing.size() <= model.inliers.size()) return;
    try {
      const TransformModel refit = FitTransform(agreeing, model.kind);
      const auto before = detail::ScoreModel(model.matrix, agreeing, threshold);
      const auto after = detail::ScoreModel(refit.matrix, agreeing, threshold);
      if (after.inliers.size() < before.inliers.size()) return;
      model.matrix = refit.matrix;
      model.rms_residual = after.rms;
    } catch (const Error&) {
      return;
    }
  }
}

// `search` restricts frame corners to the given boxes when non-empty.
inline Alignment AlignToTemplate(const Image& frame, const PreparedTemplate& prepared, const SlateConfig& c,
                                 std::span<const Rect> search = {}) {
  const SlateTemplate& t = *prepared.tpl;
  if (frame.width() < 64 || frame.height() < 64 || t.image.width() < 64 || t.image.height() < 64)
    Fail(ErrorCode::kInvalidArgument, "slate alignment needs images of at least 64 px per side");
  const Image gray = frame.channels() == 3 ? ToGrayscale(frame) : frame;
  const auto frame_desc =
      ComputeDescriptors(gray, DetectCorners(gray, c.max_corners, c.corner_min_distance, c.corner_quality, search));
  // The view with the most matches stands in for the template; ties go to
  // the earlier view.
  std::vector<PointMatch> matches;
  std::vector<PointMatch> pooled;
  for (const auto& view : prepared.views) {
    auto m = MatchDescriptors(frame_desc, view.descriptors, c.match_ratio);
    pooled.insert(pooled.end(), m.begin(), m.end());
    if (m.size() > matches.size()) matches = std::move(m);
  }
  if (matches.size() < 4) Fail(ErrorCode::kTooFewMatches, std::to_string(matches.size()) + " slate matches");
  if (static_cast<int>(matches.size()) < c.min_inliers)
    Fail(ErrorCode::kAlignmentRejected, std::to_string(matches.size()) + " matches, fewer than the inlier minimum");
  Alignment a;
  a.matches = static_cast<int>(matches.size());
  try {
    a.homography = FitTransformRansac(matches, TransformKind::kHomography, c.ransac_iterations, c.inlier_threshold, c.seed);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerate) throw;
    Fail(ErrorCode::kAlignmentRejected, "slate matches are degenerate");
  }
  RefineWithPooledMatches(a.homography, pooled, c.inlier_threshold);
  if (a.inliers() < c.min_inliers)
    Fail(ErrorCode::kAlignmentRejected,
         std::to_string(a.inliers()) + " inliers, below the minimum of " + std::to_string(c.min_inliers));
  return a;
}

inline Alignment AlignToTemplate(const Image& frame, const SlateTemplate& t, const SlateConfig& c) {
  return AlignToTemplate(frame, PreparedTemplate(t, c), c);
}

struct SlateHit {
  int frame_index = -1;
  Alignment alignment;
};

// Scans the first `scan_frames` frames and keeps the best-aligned one
// (most inliers, earliest on ties). When `detector` offers slate_detect,
// its boxes narrow the corner search of each frame.
inline SlateHit FindSlateFrame(std::span<const Image> frames, const SlateTemplate& t, const SlateConfig& c,
                               DetectorClient* detector = nullptr, const std::string& clip = "") {
  if (frames.empty()) Fail(ErrorCode::kNoSlateFound, "no frames to scan");
  const PreparedTemplate prepared(t, c);
  const std::size_t n = std::min<std::size_t>(frames.size(), static_cast<std::size_t>(std::max(c.scan_frames, 0)));
  SlateHit best;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Rect> boxes;
    if (detector && detector->Supports(DetectorKind::kSlateDetect)) {
      const auto r = detector->Call(DetectorKind::kSlateDetect, clip, static_cast<int>(i));
      if (r.ok) {
        for (const DetectedBox& b : ParseBoxes(r.result, DetectorKind::kSlateDetect)) boxes.push_back(b.box);
      }
    }
    try {
      Alignment a = AlignToTemplate(frames[i], prepared, c, boxes);
      if (best.frame_index < 0 || a.inliers() > best.alignment.inliers()) {
        best.frame_index = static_cast<int>(i);
        best.alignment = std::move(a);
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kTooFewMatches && e.code() != ErrorCode::kAlignmentRejected) throw;
    }
  }
  if (best.frame_index < 0)
    Fail(ErrorCode::kNoSlateFound, "no frame among the first " + std::to_string(n) + " aligns with slate template '" +
                                       t.template_id + "'");
  return best;
}

// Region `r` of the template, resampled out of `frame`.
inline Image CropRegion(const Image& frame, const Eigen::Matrix3d& frame_to_template, const Rect& r) {
  const Eigen::Matrix3d template_to_frame = frame_to_template.inverse();
  const int w = static_cast<int>(std::lround(r.w)), h = static_cast<int>(std::lround(r.h));
  Image crop(w, h, 1);
  const Image gray = frame.channels() == 3 ? ToGrayscale(frame) : frame;
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const Point2 p = ApplyMatrix(template_to_frame, {r.x + u, r.y + v});
      crop.at(u, v) = gray.Sample(p.x, p.y);
    }
  }
  return crop;
}

// Digits only after trimming, and small enough for an int.
inline std::optional<int> ParseSlateInteger(std::string_view raw) {
  const std::string_view t = Trim(raw);
  if (t.empty() || t.size() > 9 || !std::all_of(t.begin(), t.end(), [](char ch) { return ch >= '0' && ch <= '9'; }))
    return std::nullopt;
  return std::stoi(std::string(t));
}

inline SlateReading ExtractFields(const Image& frame, const Alignment& alignment, const SlateTemplate& t,
                                  DetectorClient& ocr, const std::string& clip, int frame_index) {
  SlateReading reading;
  reading.frame_index = frame_index;
  reading.homography = alignment.homography;
  reading.alignment_inliers = alignment.inliers();
  reading.alignment_confidence = alignment.inlier_fraction();
  for (const SlateRegion& region : t.regions) {
    const Image crop = CropRegion(frame, alignment.homography.matrix, region.rect);
    const Json payload{{"region", region.name},
                       {"value_kind", ToString(region.value_kind)},
                       {"width", crop.width()},
                       {"height", crop.height()},
                       {"image", Base64Encode(SerializeRaster(FromImage(crop)))}};
    const DetectorResponse r = ocr.Call(DetectorKind::kOcr, clip, frame_index, payload);
    if (!r.ok) continue;
    const OcrResult text = ParseOcr(r.result);
    FieldReading f;
    f.raw_text = text.text;
    if (region.value_kind == ValueKind::kInteger) f.parsed = ParseSlateInteger(text.text);
    f.confidence = text.confidence * reading.alignment_confidence;
    reading.fields.emplace(region.name, std::move(f));
  }
  return reading;
}

}  // namespace cinemeta

#endif  // CINEMETA_SLATE_HPP_
