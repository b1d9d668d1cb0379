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

// Shi-Tomasi corners: minimum eigenvalue of the gradient structure tensor
// accumulated over a 3x3 window.

#ifndef CINEMETA_GEOMETRY_CORNERS_HPP_
#define CINEMETA_GEOMETRY_CORNERS_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "cinemeta/geometry/types.hpp"
#include "cinemeta/image.hpp"

namespace cinemeta {

struct Corner {
  double x = 0.0;
  double y = 0.0;
  double response = 0.0;

  Point2 position() const { return {x, y}; }
};

// Minimum-eigenvalue response for every pixel.
inline std::vector<double> CornerResponse(const Image& gray) {
  if (gray.channels() != 1) Fail(ErrorCode::kChannelMismatch, "corner detection needs a grayscale image");
  const int w = gray.width();
  const int h = gray.height();
  const std::size_t n = static_cast<std::size_t>(w) * h;
  std::vector<double> ixx(n), ixy(n), iyy(n);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = 0.5 * (gray.clamped(x + 1, y) - gray.clamped(x - 1, y));
      const double gy = 0.5 * (gray.clamped(x, y + 1) - gray.clamped(x, y - 1));
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      ixx[i] = gx * gx;
      ixy[i] = gx * gy;
      iyy[i] = gy * gy;
    }
  }
  std::vector<double> response(n, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double a = 0, b = 0, c = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        const int sy = std::clamp(y + dy, 0, h - 1);
        for (int dx = -1; dx <= 1; ++dx) {
          const std::size_t i = static_cast<std::size_t>(sy) * w + std::clamp(x + dx, 0, w - 1);
          a += ixx[i];
          b += ixy[i];
          c += iyy[i];
        }
      }
      const double half_diff = 0.5 * (a - c);
      response[static_cast<std::size_t>(y) * w + x] =
          std::max(0.0, 0.5 * (a + c) - std::sqrt(half_diff * half_diff + b * b));
    }
  }
  return response;
}

// Corners ranked strongest first. Candidates are 3x3 local maxima with
// response >= quality * max_response; a greedy pass keeps at most `max_n`
// of them pairwise at least `min_distance` apart. When `regions` is
// non-empty only corners inside one of them are kept.
inline std::vector<Corner> DetectCorners(const Image& gray, int max_n, double min_distance, double quality,
                                         std::span<const Rect> regions = {}) {
  if (!(quality > 0.0 && quality <= 1.0)) Fail(ErrorCode::kInvalidArgument, "corner quality must be in (0,1]");
  std::vector<Corner> out;
  if (max_n <= 0) return out;
  const int w = gray.width();
  const int h = gray.height();
  const std::vector<double> r = CornerResponse(gray);
  auto at = [&](int x, int y) { return r[static_cast<std::size_t>(y) * w + x]; };
  const double max_response = *std::max_element(r.begin(), r.end());
  // Flat images carry only rounding noise.
  if (max_response <= 1e-12) return out;
  const double threshold = quality * max_response;

  std::vector<Corner> candidates;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double v = at(x, y);
      if (v < threshold || v <= 1e-12) continue;
      bool is_max = true;
      for (int dy = -1; dy <= 1 && is_max; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int sx = x + dx, sy = y + dy;
          if ((dx || dy) && sx >= 0 && sy >= 0 && sx < w && sy < h && at(sx, sy) > v) {
            is_max = false;
            break;
          }
        }
      }
      if (!is_max) continue;
      // Parabolic sub-pixel offset along each axis.
      auto offset = [](double lo, double mid, double hi) {
        const double denom = lo - 2.0 * mid + hi;
        return denom < 0.0 ? std::clamp(0.5 * (lo - hi) / denom, -0.5, 0.5) : 0.0;
      };
      double fx = x, fy = y;
      if (x > 0 && x < w - 1) fx += offset(at(x - 1, y), v, at(x + 1, y));
      if (y > 0 && y < h - 1) fy += offset(at(x, y - 1), v, at(x, y + 1));
      fx = std::clamp(fx, 0.0, w - 1.0);
      fy = std::clamp(fy, 0.0, h - 1.0);
      if (!regions.empty() &&
          std::none_of(regions.begin(), regions.end(), [&](const Rect& rc) { return rc.Contains({fx, fy}); })) {
        continue;
      }
      candidates.push_back({fx, fy, v});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Corner& a, const Corner& b) { return a.response > b.response; });
  const double min_d2 = min_distance * min_distance;
  for (const Corner& c : candidates) {
    const bool far = std::all_of(out.begin(), out.end(), [&](const Corner& k) {
      const double dx = k.x - c.x, dy = k.y - c.y;
      return dx * dx + dy * dy >= min_d2;
    });
    if (!far) continue;
    out.push_back(c);
    if (static_cast<int>(out.size()) >= max_n) break;
  }
  return out;
}

}  // namespace cinemeta

#endif  // CINEMETA_GEOMETRY_CORNERS_HPP_
