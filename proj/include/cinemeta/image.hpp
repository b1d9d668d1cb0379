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

#ifndef CINEMETA_IMAGE_HPP_
#define CINEMETA_IMAGE_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <string_view>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cinemeta/error.hpp"

namespace cinemeta {

// Planar-interleaved raster: samples row-major, channels interleaved per
// pixel, nominal range [0,1].
class Image {
 public:
  static constexpr double kEpsilon = 1e-6;

  Image() = default;
  Image(int width, int height, int channels, double fill = 0.0)
      : width_(width), height_(height), channels_(channels) {
    if (width <= 0 || height <= 0) Fail(ErrorCode::kInvalidArgument, "image dimensions must be positive");
    if (channels != 1 && channels != 3) Fail(ErrorCode::kInvalidArgument, "image must have 1 or 3 channels");
    data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
  }
  Image(int width, int height, int channels, std::vector<double> data)
      : Image(width, height, channels) {
    if (data.size() != data_.size()) Fail(ErrorCode::kInvalidArgument, "image sample count mismatch");
    data_ = std::move(data);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return data_.empty(); }

  double& at(int x, int y, int c = 0) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  double at(int x, int y, int c = 0) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  // Edge-replicating read.
  double clamped(int x, int y, int c = 0) const {
    return at(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1), c);
  }

  // Bilinear sample at continuous pixel coordinates (pixel centers at
  // integers), edge-replicating outside the raster.
  double Sample(double x, double y, int c = 0) const {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = clamped(x0, y0, c) * (1 - fx) + clamped(x0 + 1, y0, c) * fx;
    const double bottom = clamped(x0, y0 + 1, c) * (1 - fx) + clamped(x0 + 1, y0 + 1, c) * fx;
    return top * (1 - fy) + bottom * fy;
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  void Clamp() {
    for (double& v : data_) v = std::clamp(v, 0.0, 1.0);
  }

  bool operator==(const Image&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

enum class BayerPattern { kRGGB, kBGGR, kGRBG, kGBRG };

inline std::string_view ToString(BayerPattern p) {
  switch (p) {
    case BayerPattern::kRGGB: return "RGGB";
    case BayerPattern::kBGGR: return "BGGR";
    case BayerPattern::kGRBG: return "GRBG";
    case BayerPattern::kGBRG: return "GBRG";
  }
  return "";
}

inline std::optional<BayerPattern> BayerPatternFromString(std::string_view s) {
  for (BayerPattern p : {BayerPattern::kRGGB, BayerPattern::kBGGR, BayerPattern::kGRBG,
                         BayerPattern::kGBRG}) {
    if (ToString(p) == s) return p;
  }
  return std::nullopt;
}

// Channel (0=R, 1=G, 2=B) sampled by the color filter at (x, y).
inline int BayerChannel(BayerPattern p, int x, int y) {
  const std::string_view layout = ToString(p);
  const char c = layout[(y & 1) * 2 + (x & 1)];
  return c == 'R' ? 0 : (c == 'G' ? 1 : 2);
}

}  // namespace cinemeta

#endif  // CINEMETA_IMAGE_HPP_
