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

// Exhaustive-search SSD block matching between two frames.

#ifndef CINEMETA_GEOMETRY_TRACKING_HPP_
#define CINEMETA_GEOMETRY_TRACKING_HPP_

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <span>
#include <vector>

#include "cinemeta/geometry/types.hpp"
#include "cinemeta/image.hpp"

namespace cinemeta {

struct TrackParams {
  int window = 11;
  int search_radius = 16;
  // Mean squared difference per window pixel above which a point is lost.
  double max_mean_ssd = 0.01;
};

struct TrackResult {
  Point2 point;
  Point2 displacement;
  int integer_dx = 0;  // before sub-pixel refinement
  int integer_dy = 0;
  double ssd = 0.0;
  bool lost = false;
};

namespace detail {

inline bool WindowInside(const Image& img, int cx, int cy, int half) {
  return cx - half >= 0 && cy - half >= 0 && cx + half < img.width() && cy + half < img.height();
}

// SSD between the window at (ax, ay) in `a` and (bx, by) in `b`; abandons
// the sum once it passes `bound`.
inline double WindowSsd(const Image& a, int ax, int ay, const Image& b, int bx, int by, int half, double bound) {
  double s = 0.0;
  for (int dy = -half; dy <= half; ++dy) {
    for (int dx = -half; dx <= half; ++dx) {
      const double d = a.at(ax + dx, ay + dy) - b.at(bx + dx, by + dy);
      s += d * d;
    }
    if (s > bound) return s;
  }
  return s;
}

inline double ParabolaOffset(double lo, double mid, double hi) {
  const double denom = lo - 2.0 * mid + hi;
  if (!(denom > 0.0)) return 0.0;
  return std::clamp(0.5 * (lo - hi) / denom, -0.5, 0.5);
}

}  // namespace detail

inline TrackResult TrackPoint(const Image& a, const Image& b, Point2 p, const TrackParams& params) {
  const int half = params.window / 2;
  const int R = params.search_radius;
  TrackResult r;
  r.point = p;
  const int px = static_cast<int>(std::lround(p.x));
  const int py = static_cast<int>(std::lround(p.y));
  if (!detail::WindowInside(a, px, py, half)) {
    r.lost = true;
    return r;
  }
  constexpr double kUnset = std::numeric_limits<double>::infinity();
  double best = kUnset;
  int best_dx = 0, best_dy = 0;
  // Equal SSDs resolve to the smaller motion.
  for (int dy = -R; dy <= R; ++dy) {
    for (int dx = -R; dx <= R; ++dx) {
      if (!detail::WindowInside(b, px + dx, py + dy, half)) continue;
      const double s = detail::WindowSsd(a, px, py, b, px + dx, py + dy, half, best);
      const bool better = s < best || (s == best && std::abs(dx) + std::abs(dy) < std::abs(best_dx) + std::abs(best_dy));
      if (better) {
        best = s;
        best_dx = dx;
        best_dy = dy;
      }
    }
  }
  const double area = static_cast<double>(params.window) * params.window;
  if (best == kUnset || best / area > params.max_mean_ssd) {
    r.lost = true;
    r.ssd = best;
    return r;
  }
  auto feasible = [&](int dx, int dy) {
    return std::abs(dx) <= R && std::abs(dy) <= R && detail::WindowInside(b, px + dx, py + dy, half);
  };
  // A minimum pressed against the edge of the search area (frame border or
  // radius) may be a clipped one; the true match can lie beyond it.
  if (!feasible(best_dx - 1, best_dy) || !feasible(best_dx + 1, best_dy) || !feasible(best_dx, best_dy - 1) ||
      !feasible(best_dx, best_dy + 1)) {
    r.lost = true;
    r.ssd = best;
    return r;
  }
  // Early-abandoned entries are lower bounds only; recompute neighbours
  // exactly for the parabola fit.
  auto exact = [&](int dx, int dy) { return detail::WindowSsd(a, px, py, b, px + dx, py + dy, half, kUnset); };
  double ox = 0.0, oy = 0.0;
  r.integer_dx = best_dx;
  r.integer_dy = best_dy;
  r.ssd = best;
  if (best == 0.0) {  // exact match, nothing to refine
    r.displacement = {double(best_dx), double(best_dy)};
    return r;
  }
  ox = detail::ParabolaOffset(exact(best_dx - 1, best_dy), best, exact(best_dx + 1, best_dy));
  oy = detail::ParabolaOffset(exact(best_dx, best_dy - 1), best, exact(best_dx, best_dy + 1));
  r.displacement = {best_dx + ox, best_dy + oy};
  return r;
}

// Window must be odd and at least 5.
inline std::vector<TrackResult> TrackPoints(const Image& a, const Image& b, std::span<const Point2> points,
                                            const TrackParams& params = {}) {
  if (params.window < 5 || params.window % 2 == 0)
    Fail(ErrorCode::kInvalidArgument, "track window must be odd and at least 5");
  if (params.search_radius < 0) Fail(ErrorCode::kInvalidArgument, "search radius must be non-negative");
  if (a.channels() != 1 || b.channels() != 1) Fail(ErrorCode::kChannelMismatch, "tracking needs grayscale frames");
  if (a.width() != b.width() || a.height() != b.height())
    Fail(ErrorCode::kDimensionMismatch, "tracked frames differ in size");
  std::vector<TrackResult> out;
  out.reserve(points.size());
  for (const Point2& p : points) out.push_back(TrackPoint(a, b, p, params));
  return out;
}

}  // namespace cinemeta

#endif  // CINEMETA_GEOMETRY_TRACKING_HPP_
