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

// Camera movement from global motion between sampled frames: a similarity
// model per frame pair, then a fixed-priority decision table over the
// medians of those models.

#ifndef CINEMETA_CAMERA_MOVE_HPP_
#define CINEMETA_CAMERA_MOVE_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cinemeta/error.hpp"
#include "cinemeta/geometry/corners.hpp"
#include "cinemeta/geometry/tracking.hpp"
#include "cinemeta/geometry/transform.hpp"
#include "cinemeta/metadata_model.hpp"

namespace cinemeta {

struct CameraMoveConfig {
  int stride = 1;
  int max_corners = 200;
  double corner_min_distance = 5.0;
  double corner_quality = 0.01;
  TrackParams track;
  int ransac_iterations = 300;
  double inlier_threshold = 1.0;
  int min_points = 8;
  std::uint64_t seed = 0;

  double tau_parallax = 0.15;
  double static_t = 0.002;    // fraction of the frame diagonal
  double scale_eps = 0.002;   // static band on |s - 1|
  double zoom_scale = 0.004;  // minimum |s - 1| for zoom or dolly
  double flip_fraction = 0.3;
  double consistency = 0.8;
  double parallax_floor = 0.5;  // px, denominator floor for parallax_ratio

  static CameraMoveConfig FromJson(const Json& j) {
    CameraMoveConfig c;
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    };
    get("stride", c.stride);
    get("max_corners", c.max_corners);
    get("tau_parallax", c.tau_parallax);
    get("static_t", c.static_t);
    get("scale_eps", c.scale_eps);
    get("flip_fraction", c.flip_fraction);
    get("zoom_scale", c.zoom_scale);
    get("consistency", c.consistency);
    get("ransac_iterations", c.ransac_iterations);
    get("inlier_threshold", c.inlier_threshold);
    get("search_radius", c.track.search_radius);
    get("window", c.track.window);
    if (c.stride < 1) Fail(ErrorCode::kConfig, "camera_move.stride must be >= 1");
    if (c.max_corners < 1) Fail(ErrorCode::kConfig, "camera_move.max_corners must be >= 1");
    return c;
  }
};

struct MotionSample {
  int frame_a = 0;
  int frame_b = 0;
  bool valid = false;
  TransformModel model;  // similarity, pixel coordinates, frame_a -> frame_b
  // Translation of the frame centre; zero for a pure zoom about the centre.
  Point2 mean_translation;
  double scale = 1.0;
  // Trimmed-RMS residual of all tracked points against the model, over the
  // RMS displacement the model predicts for them.
  double parallax_ratio = 0.0;
  int tracked_points = 0;
  double frame_diagonal = 0.0;
};

struct MoveDecision {
  CameraMove label = CameraMove::kUnknown;
  double confidence = 0.0;
  Json evidence = Json::object();
};

namespace detail {

inline double Median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  if (v.size() % 2) return v[mid];
  const double hi = v[mid];
  return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + mid));
}

inline int Sign(double v) { return (v > 0) - (v < 0); }

}  // namespace detail

inline MotionSample AnalyzePair(const Image& a, const Image& b, int index_a, int index_b,
                                const CameraMoveConfig& config) {
  MotionSample s;
  s.frame_a = index_a;
  s.frame_b = index_b;
  s.frame_diagonal = std::hypot(a.width(), a.height());
  const auto corners = DetectCorners(a, config.max_corners, config.corner_min_distance, config.corner_quality);
  std::vector<Point2> pts;
  pts.reserve(corners.size());
  for (const Corner& c : corners) pts.push_back(c.position());
  const auto tracks = TrackPoints(a, b, pts, config.track);
  std::vector<PointMatch> matches;
  for (const auto& t : tracks) {
    if (!t.lost) matches.push_back({t.point, t.point + t.displacement, t.ssd});
  }
  s.tracked_points = static_cast<int>(matches.size());
  if (s.tracked_points < config.min_points) return s;
  try {
    s.model = FitTransformRansac(matches, TransformKind::kSimilarity, config.ransac_iterations,
                                 config.inlier_threshold, config.seed * 1000003u + index_a);
  } catch (const Error&) {
    return s;
  }
  const Point2 centre{(a.width() - 1) / 2.0, (a.height() - 1) / 2.0};
  s.mean_translation = s.model.Apply(centre) - centre;
  s.scale = s.model.scale();

  std::vector<double> residual2;
  double predicted2 = 0.0;
  for (const PointMatch& m : matches) {
    const Point2 p = s.model.Apply(m.a);
    const double r = Norm(p - m.b), d = Norm(p - m.a);
    residual2.push_back(r * r);
    predicted2 += d * d;
  }
  // Drop the worst tenth: isolated mis-tracks, not structure.
  std::sort(residual2.begin(), residual2.end());
  residual2.resize(residual2.size() - residual2.size() / 10);
  double sum = 0.0;
  for (double r2 : residual2) sum += r2;
  const double rms_residual = std::sqrt(sum / residual2.size());
  const double rms_predicted = std::sqrt(predicted2 / matches.size());
  s.parallax_ratio = rms_residual / std::max(rms_predicted, config.parallax_floor);
  s.valid = true;
  return s;
}

// One sample per sampled pair (i, i + stride), i = 0, stride, 2*stride...
inline std::vector<MotionSample> AnalyzeClip(std::span<const Image> frames, const CameraMoveConfig& config) {
  if (frames.size() < 2) Fail(ErrorCode::kTooFewFrames, "camera move analysis needs at least 2 frames");
  std::vector<MotionSample> out;
  for (std::size_t i = 0; i + config.stride < frames.size(); i += config.stride) {
    out.push_back(AnalyzePair(frames[i], frames[i + config.stride], static_cast<int>(i),
                              static_cast<int>(i + config.stride), config));
  }
  return out;
}

inline MoveDecision Classify(std::span<const MotionSample> samples, const CameraMoveConfig& config) {
  std::vector<const MotionSample*> valid;
  for (const MotionSample& s : samples) {
    if (s.valid) valid.push_back(&s);
  }
  if (valid.empty()) Fail(ErrorCode::kNoValidSamples, "no valid motion samples");

  auto median_of = [&](auto f) {
    std::vector<double> v;
    for (const MotionSample* s : valid) v.push_back(f(*s));
    return detail::Median(std::move(v));
  };
  auto fraction = [&](auto pred) {
    int n = 0;
    for (const MotionSample* s : valid) n += pred(*s) ? 1 : 0;
    return static_cast<double>(n) / valid.size();
  };

  const double diag = median_of([](const MotionSample& s) { return s.frame_diagonal; });
  const double t_static = config.static_t * diag;
  const double med_t = median_of([](const MotionSample& s) { return Norm(s.mean_translation); });
  const double med_ds = median_of([](const MotionSample& s) { return s.scale - 1.0; });
  const double med_abs_ds = median_of([](const MotionSample& s) { return std::abs(s.scale - 1.0); });
  const double med_tx = median_of([](const MotionSample& s) { return s.mean_translation.x; });
  const double med_ty = median_of([](const MotionSample& s) { return s.mean_translation.y; });
  const double med_abs_tx = median_of([](const MotionSample& s) { return std::abs(s.mean_translation.x); });
  const double med_abs_ty = median_of([](const MotionSample& s) { return std::abs(s.mean_translation.y); });
  const double med_parallax = median_of([](const MotionSample& s) { return s.parallax_ratio; });

  int flips = 0;
  for (std::size_t i = 1; i < valid.size(); ++i) {
    const Point2 p = valid[i - 1]->mean_translation, q = valid[i]->mean_translation;
    flips += (p.x * q.x + p.y * q.y) < 0.0 ? 1 : 0;
  }
  const double flip_fraction = valid.size() > 1 ? static_cast<double>(flips) / (valid.size() - 1) : 0.0;

  MoveDecision d;
  d.evidence = {{"valid_samples", valid.size()},
                {"frame_diagonal", diag},
                {"median_t", med_t},
                {"median_scale_delta", med_ds},
                {"median_abs_tx", med_abs_tx},
                {"median_abs_ty", med_abs_ty},
                {"median_parallax_ratio", med_parallax},
                {"flip_fraction", flip_fraction}};
  const bool parallax = med_parallax > config.tau_parallax;
  auto parallax_agrees = [&](const MotionSample& s) { return (s.parallax_ratio > config.tau_parallax) == parallax; };

  // 1. static
  if (med_t < t_static && med_abs_ds < config.scale_eps) {
    d.label = CameraMove::kStatic;
    d.confidence = fraction([&](const MotionSample& s) {
      return Norm(s.mean_translation) < t_static && std::abs(s.scale - 1.0) < config.scale_eps;
    });
    return d;
  }
  // 2. handheld; its per-sample predicate is a per-pair one.
  if (flip_fraction > config.flip_fraction && med_t >= t_static) {
    d.label = CameraMove::kHandheld;
    d.confidence = flip_fraction;
    return d;
  }
  // 3. zoom or dolly
  const int scale_sign = detail::Sign(med_ds);
  const double scale_consistency =
      fraction([&](const MotionSample& s) { return detail::Sign(s.scale - 1.0) == scale_sign; });
  if (med_abs_ds >= config.zoom_scale && scale_consistency >= config.consistency) {
    d.label = parallax ? CameraMove::kDolly : CameraMove::kZoom;
    d.confidence = fraction([&](const MotionSample& s) {
      return std::abs(s.scale - 1.0) >= config.zoom_scale && detail::Sign(s.scale - 1.0) == scale_sign &&
             parallax_agrees(s);
    });
    return d;
  }
  // 4 and 5. lateral then vertical translation
  const auto axis_rule = [&](double med_main, double med_abs_main, double med_abs_other, bool horizontal,
                             CameraMove rotate, CameraMove translate) -> bool {
    const int sign = detail::Sign(med_main);
    auto main = [&](const MotionSample& s) { return horizontal ? s.mean_translation.x : s.mean_translation.y; };
    auto other = [&](const MotionSample& s) { return horizontal ? s.mean_translation.y : s.mean_translation.x; };
    const double consistent = fraction([&](const MotionSample& s) { return detail::Sign(main(s)) == sign; });
    if (!(med_abs_main > 2.0 * med_abs_other && med_abs_main >= t_static && consistent >= config.consistency))
      return false;
    d.label = parallax ? translate : rotate;
    d.confidence = fraction([&](const MotionSample& s) {
      return std::abs(main(s)) > 2.0 * std::abs(other(s)) && detail::Sign(main(s)) == sign && parallax_agrees(s);
    });
    return true;
  };
  if (axis_rule(med_tx, med_abs_tx, med_abs_ty, true, CameraMove::kPan, CameraMove::kTruck)) return d;
  if (axis_rule(med_ty, med_abs_ty, med_abs_tx, false, CameraMove::kTilt, CameraMove::kPedestal)) return d;
  d.label = CameraMove::kUnknown;
  d.confidence = 0.0;
  return d;
}

}  // namespace cinemeta

#endif  // CINEMETA_CAMERA_MOVE_HPP_
