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

// Orientation-less binary descriptors in the spirit of BRIEF/ORB, with
// mutual nearest-neighbour matching.

#ifndef CINEMETA_GEOMETRY_DESCRIPTORS_HPP_
#define CINEMETA_GEOMETRY_DESCRIPTORS_HPP_

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "cinemeta/geometry/corners.hpp"

namespace cinemeta {

inline constexpr int kDescriptorBits = 256;
inline constexpr int kPatchRadius = 15;  // 31x31 patch

struct Descriptor {
  std::array<std::uint64_t, kDescriptorBits / 64> bits{};
  Corner center;

  bool bit(int i) const { return (bits[i / 64] >> (i % 64)) & 1u; }
  void set_bit(int i) { bits[i / 64] |= std::uint64_t{1} << (i % 64); }
};

struct PointMatch {
  Point2 a;
  Point2 b;
  double score = 0.0;
};

inline int Hamming(const Descriptor& a, const Descriptor& b) {
  int d = 0;
  for (std::size_t i = 0; i < a.bits.size(); ++i) d += std::popcount(a.bits[i] ^ b.bits[i]);
  return d;
}

struct SamplePair {
  int x1, y1, x2, y2;
};

// The comparison layout. Fixed forever: changing the seed changes every
// stored descriptor.
inline const std::array<SamplePair, kDescriptorBits>& SamplingPattern() {
  static const std::array<SamplePair, kDescriptorBits> pattern = [] {
    std::array<SamplePair, kDescriptorBits> p{};
    std::mt19937 engine(0x0C1E3E7Au);
    auto coord = [&] { return static_cast<int>(engine() % (2 * kPatchRadius + 1)) - kPatchRadius; };
    for (auto& s : p) {
      do {
        s = {coord(), coord(), coord(), coord()};
      } while (s.x1 == s.x2 && s.y1 == s.y2);
    }
    return p;
  }();
  return pattern;
}

namespace detail {

inline Image BoxBlur5(const Image& img) {
  Image out(img.width(), img.height(), 1);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      double s = 0.0;
      for (int dy = -2; dy <= 2; ++dy)
        for (int dx = -2; dx <= 2; ++dx) s += img.clamped(x + dx, y + dy);
      out.at(x, y) = s / 25.0;
    }
  }
  return out;
}

}  // namespace detail

inline bool IsDescribable(const Image& img, const Corner& c) {
  const long cx = std::lround(c.x), cy = std::lround(c.y);
  return cx >= kPatchRadius && cy >= kPatchRadius && cx < img.width() - kPatchRadius &&
         cy < img.height() - kPatchRadius;
}

// Corners closer than half a patch to the border are skipped.
inline std::vector<Descriptor> ComputeDescriptors(const Image& gray, std::span<const Corner> corners) {
  if (gray.channels() != 1) Fail(ErrorCode::kChannelMismatch, "descriptors need a grayscale image");
  std::vector<Descriptor> out;
  if (corners.empty()) return out;
  const Image smooth = detail::BoxBlur5(gray);
  const auto& pattern = SamplingPattern();
  for (const Corner& c : corners) {
    if (!IsDescribable(gray, c)) continue;
    const int cx = static_cast<int>(std::lround(c.x)), cy = static_cast<int>(std::lround(c.y));
    Descriptor d;
    d.center = c;
    for (int i = 0; i < kDescriptorBits; ++i) {
      const SamplePair& s = pattern[i];
      if (smooth.at(cx + s.x1, cy + s.y1) < smooth.at(cx + s.x2, cy + s.y2)) d.set_bit(i);
    }
    out.push_back(d);
  }
  return out;
}

namespace detail {

struct Nearest {
  int index = -1;
  int best = std::numeric_limits<int>::max();
  int second = std::numeric_limits<int>::max();
};

inline std::vector<Nearest> NearestNeighbours(std::span<const Descriptor> from, std::span<const Descriptor> to) {
  std::vector<Nearest> out(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) {
    Nearest& n = out[i];
    for (std::size_t j = 0; j < to.size(); ++j) {
      const int d = Hamming(from[i], to[j]);
      if (d < n.best) {
        n.second = n.best;
        n.best = d;
        n.index = static_cast<int>(j);
      } else if (d < n.second) {
        n.second = d;
      }
    }
  }
  return out;
}

inline bool PassesRatio(const Nearest& n, double ratio) {
  if (n.second == std::numeric_limits<int>::max()) return true;  // lone candidate
  return n.best < ratio * n.second;
}

}  // namespace detail

// Mutual nearest neighbours under Hamming distance. The ratio test is
// applied from both sides, which keeps the result symmetric in (a, b).
inline std::vector<PointMatch> MatchDescriptors(std::span<const Descriptor> a, std::span<const Descriptor> b,
                                                double ratio) {
  const auto ab = detail::NearestNeighbours(a, b);
  const auto ba = detail::NearestNeighbours(b, a);
  std::vector<PointMatch> out;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const int j = ab[i].index;
    if (j < 0 || ba[j].index != static_cast<int>(i)) continue;
    if (!detail::PassesRatio(ab[i], ratio) || !detail::PassesRatio(ba[j], ratio)) continue;
    out.push_back({a[i].center.position(), b[j].center.position(), static_cast<double>(ab[i].best)});
  }
  return out;
}

}  // namespace cinemeta

#endif  // CINEMETA_GEOMETRY_DESCRIPTORS_HPP_
