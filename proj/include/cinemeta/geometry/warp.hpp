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

#ifndef CINEMETA_GEOMETRY_WARP_HPP_
#define CINEMETA_GEOMETRY_WARP_HPP_

#include <Eigen/Dense>

#include "cinemeta/geometry/transform.hpp"
#include "cinemeta/image.hpp"

namespace cinemeta {

// Inverse-mapped bilinear warp. Output pixel (x, y) samples `src` at
// dst_to_src * (x, y); pixels that land outside `src` keep `fill`.
inline Image WarpImage(const Image& src, const Eigen::Matrix3d& dst_to_src, int width, int height,
                       double fill = 0.0) {
  Image out(width, height, src.channels(), fill);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const Point2 p = ApplyMatrix(dst_to_src, {static_cast<double>(x), static_cast<double>(y)});
      if (!(p.x >= 0.0 && p.y >= 0.0 && p.x <= src.width() - 1.0 && p.y <= src.height() - 1.0)) continue;
      for (int c = 0; c < src.channels(); ++c) out.at(x, y, c) = src.Sample(p.x, p.y, c);
    }
  }
  return out;
}

// Draws `src` onto `dst` under the forward map src_to_dst.
inline void PasteWarped(Image& dst, const Image& src, const Eigen::Matrix3d& src_to_dst) {
  const Eigen::Matrix3d inv = src_to_dst.inverse();
  for (int y = 0; y < dst.height(); ++y) {
    for (int x = 0; x < dst.width(); ++x) {
      const Point2 p = ApplyMatrix(inv, {static_cast<double>(x), static_cast<double>(y)});
      if (!(p.x >= 0.0 && p.y >= 0.0 && p.x <= src.width() - 1.0 && p.y <= src.height() - 1.0)) continue;
      for (int c = 0; c < dst.channels(); ++c) dst.at(x, y, c) = src.Sample(p.x, p.y, c);
    }
  }
}

}  // namespace cinemeta

#endif  // CINEMETA_GEOMETRY_WARP_HPP_
