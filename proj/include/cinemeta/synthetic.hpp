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

// Procedural scenes and camera paths for fixtures, demos and the
// acceptance harness. Everything is a pure function of the seed.

#ifndef CINEMETA_SYNTHETIC_HPP_
#define CINEMETA_SYNTHETIC_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <iterator>
#include <numbers>
#include <random>
#include <vector>

#include "cinemeta/geometry/transform.hpp"
#include "cinemeta/geometry/warp.hpp"
#include "cinemeta/image.hpp"
#include "cinemeta/metadata_model.hpp"
#include "cinemeta/slate.hpp"

namespace cinemeta::synthetic {

// An infinite-ish textured plane: smooth value noise under randomly placed
// flat rectangles, evaluated at continuous world coordinates.
class Texture {
 public:
  Texture(std::uint64_t seed, double extent = 1024.0, double density = 1.0 / 180.0) : extent_(extent) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    cells_ = static_cast<int>(std::ceil(2 * extent_ / kCell));
    noise_side_ = static_cast<int>(std::ceil(2 * extent_ / kNoiseStep)) + 2;
    noise_.resize(static_cast<std::size_t>(noise_side_) * noise_side_);
    for (double& v : noise_) v = unit(rng);
    buckets_.resize(static_cast<std::size_t>(cells_) * cells_);
    const int count = static_cast<int>(4 * extent_ * extent_ * density);
    for (int i = 0; i < count; ++i) {
      Box b;
      b.w = 3.0 + 15.0 * unit(rng);
      b.h = 3.0 + 15.0 * unit(rng);
      b.x = -extent_ + (2 * extent_ - b.w) * unit(rng);
      b.y = -extent_ + (2 * extent_ - b.h) * unit(rng);
      b.value = unit(rng);
      const int cx0 = Cell(b.x), cx1 = Cell(b.x + b.w), cy0 = Cell(b.y), cy1 = Cell(b.y + b.h);
      boxes_.push_back(b);
      for (int cy = cy0; cy <= cy1; ++cy)
        for (int cx = cx0; cx <= cx1; ++cx) buckets_[static_cast<std::size_t>(cy) * cells_ + cx].push_back(i);
    }
  }

  double Eval(double x, double y) const {
    double v = 0.2 + 0.6 * Noise(x, y);
    if (x < -extent_ || y < -extent_ || x >= extent_ || y >= extent_) return v;
    for (int i : buckets_[static_cast<std::size_t>(Cell(y)) * cells_ + Cell(x)]) {
      const Box& b = boxes_[i];
      // Edges ramp over kSoftness px, standing in for lens blur.
      const double inside = std::min({x - b.x, b.x + b.w - x, y - b.y, b.y + b.h - y});
      if (inside <= 0.0) continue;
      const double a = std::min(1.0, inside / kSoftness);
      v += (b.value - v) * a * a * (3 - 2 * a);
    }
    return v;
  }

 private:
  static constexpr double kCell = 32.0;
  static constexpr double kNoiseStep = 12.0;
  static constexpr double kSoftness = 1.5;

  struct Box {
    double x, y, w, h, value;
  };

  int Cell(double v) const { return std::clamp(static_cast<int>((v + extent_) / kCell), 0, cells_ - 1); }

  double Noise(double x, double y) const {
    const double gx = std::clamp((x + extent_) / kNoiseStep, 0.0, noise_side_ - 1.001);
    const double gy = std::clamp((y + extent_) / kNoiseStep, 0.0, noise_side_ - 1.001);
    const int ix = static_cast<int>(gx), iy = static_cast<int>(gy);
    double fx = gx - ix, fy = gy - iy;
    fx = fx * fx * (3 - 2 * fx);
    fy = fy * fy * (3 - 2 * fy);
    auto n = [&](int a, int b) { return noise_[static_cast<std::size_t>(b) * noise_side_ + a]; };
    return (n(ix, iy) * (1 - fx) + n(ix + 1, iy) * fx) * (1 - fy) +
           (n(ix, iy + 1) * (1 - fx) + n(ix + 1, iy + 1) * fx) * fy;
  }

  double extent_;
  int cells_ = 0;
  int noise_side_ = 0;
  std::vector<double> noise_;
  std::vector<Box> boxes_;
  std::vector<std::vector<int>> buckets_;
};

// Per-pixel world lookup; `view_to_world` maps pixel centres into the
// texture plane. 2x2 supersampling keeps edges anti-aliased.
using WorldLookup = std::function<double(int x, int y, double wx, double wy)>;

inline Image Render(int width, int height, const Eigen::Matrix3d& view_to_world, const WorldLookup& lookup) {
  Image img(width, height, 1);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double s = 0.0;
      for (double oy : {-0.25, 0.25}) {
        for (double ox : {-0.25, 0.25}) {
          const Point2 w = ApplyMatrix(view_to_world, {x + ox, y + oy});
          s += lookup(x, y, w.x, w.y);
        }
      }
      img.at(x, y) = s / 4.0;
    }
  }
  return img;
}

inline Image Render(const Texture& tex, int width, int height, const Eigen::Matrix3d& view_to_world) {
  return Render(width, height, view_to_world, [&](int, int, double wx, double wy) { return tex.Eval(wx, wy); });
}

inline Eigen::Matrix3d Translation(double tx, double ty) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  m(0, 2) = tx;
  m(1, 2) = ty;
  return m;
}

// Scaling by `s` about (cx, cy).
inline Eigen::Matrix3d ScaleAbout(double s, double cx, double cy) {
  return Translation(cx, cy) * Eigen::Vector3d(s, s, 1.0).asDiagonal() * Translation(-cx, -cy);
}

struct ClipSpec {
  int width = 160;
  int height = 120;
  int frames = 10;
  std::uint64_t seed = 1;
  double noise_sigma = 0.0;  // additive Gaussian sensor noise
};

inline void AddNoise(Image& img, double sigma, std::mt19937_64& rng) {
  if (sigma <= 0.0) return;
  std::normal_distribution<double> n(0.0, sigma);
  for (double& v : img.data()) v += n(rng);
  img.Clamp();
}

// Content displacement per frame is (dx, dy): frame i shows the texture
// moved by i * (dx, dy).
inline std::vector<Image> Pan(const ClipSpec& spec, double dx, double dy) {
  const Texture tex(spec.seed);
  std::mt19937_64 rng(spec.seed ^ 0x9E3779B97F4A7C15ull);
  std::vector<Image> out;
  for (int i = 0; i < spec.frames; ++i) {
    out.push_back(Render(tex, spec.width, spec.height, Translation(-dx * i, -dy * i)));
    AddNoise(out.back(), spec.noise_sigma, rng);
  }
  return out;
}

inline std::vector<Image> Static(const ClipSpec& spec) { return Pan(spec, 0.0, 0.0); }

// Content magnified by `factor` per frame about the frame centre.
inline std::vector<Image> Zoom(const ClipSpec& spec, double factor) {
  const Texture tex(spec.seed);
  std::mt19937_64 rng(spec.seed ^ 0x9E3779B97F4A7C15ull);
  const double cx = (spec.width - 1) / 2.0, cy = (spec.height - 1) / 2.0;
  std::vector<Image> out;
  for (int i = 0; i < spec.frames; ++i) {
    out.push_back(Render(tex, spec.width, spec.height, ScaleAbout(std::pow(factor, -i), cx, cy)));
    AddNoise(out.back(), spec.noise_sigma, rng);
  }
  return out;
}

// Shaky hand: each frame jumps `amplitude` px in a direction roughly
// opposite to the previous jump.
inline std::vector<Image> Handheld(const ClipSpec& spec, double amplitude) {
  const Texture tex(spec.seed);
  std::mt19937_64 rng(spec.seed ^ 0x243F6A8885A308D3ull);
  std::uniform_real_distribution<double> wobble(-std::numbers::pi / 3, std::numbers::pi / 3);
  std::uniform_real_distribution<double> start(0.0, 2 * std::numbers::pi);
  double angle = start(rng);
  double ox = 0.0, oy = 0.0;
  std::vector<Image> out;
  for (int i = 0; i < spec.frames; ++i) {
    if (i > 0) {
      angle += std::numbers::pi + wobble(rng);
      ox += amplitude * std::cos(angle);
      oy += amplitude * std::sin(angle);
    }
    out.push_back(Render(tex, spec.width, spec.height, Translation(-ox, -oy)));
    AddNoise(out.back(), spec.noise_sigma, rng);
  }
  return out;
}

// Lateral camera move over two depth planes: the lower half of the frame
// (near) moves `near` px per frame, the upper half (far) `far` px. With
// `vertical` the planes split left/right and motion runs along y.
inline std::vector<Image> TwoPlane(const ClipSpec& spec, double near, double far, bool vertical = false) {
  const Texture near_tex(spec.seed), far_tex(spec.seed + 7919);
  std::vector<Image> out;
  for (int i = 0; i < spec.frames; ++i) {
    const auto lookup = [&](int x, int y, double wx, double wy) {
      const bool is_near = vertical ? x >= spec.width / 2 : y >= spec.height / 2;
      const double shift = (is_near ? near : far) * i;
      if (vertical) return (is_near ? near_tex : far_tex).Eval(wx, wy - shift);
      return (is_near ? near_tex : far_tex).Eval(wx - shift, wy);
    };
    out.push_back(Render(spec.width, spec.height, Eigen::Matrix3d::Identity(), lookup));
  }
  return out;
}

// Two depth planes approaching the camera: near content magnifies by
// `near` per frame, far content by `far`.
inline std::vector<Image> TwoPlaneDolly(const ClipSpec& spec, double near, double far) {
  const Texture near_tex(spec.seed), far_tex(spec.seed + 7919);
  const double cx = (spec.width - 1) / 2.0, cy = (spec.height - 1) / 2.0;
  std::vector<Image> out;
  for (int i = 0; i < spec.frames; ++i) {
    const Eigen::Matrix3d mn = ScaleAbout(std::pow(near, -i), cx, cy), mf = ScaleAbout(std::pow(far, -i), cx, cy);
    const auto lookup = [&](int x, int y, double, double) {
      const bool is_near = std::abs(x - cx) > spec.width / 4.0 || std::abs(y - cy) > spec.height / 4.0;
      const Point2 w = ApplyMatrix(is_near ? mn : mf, {double(x), double(y)});
      return (is_near ? near_tex : far_tex).Eval(w.x, w.y);
    };
    out.push_back(Render(spec.width, spec.height, Eigen::Matrix3d::Identity(), lookup));
  }
  return out;
}

// A clip of the given movement class with seeded, randomised magnitude
// and direction. Pan/tilt move 2-6 px per frame, zooms 1.5-3% per frame
// in or out, handheld jumps 3-6 px, truck/pedestal put the near plane 3-4x
// faster than the far one.
inline std::vector<Image> MovementClip(CameraMove move, ClipSpec spec) {
  std::mt19937_64 rng(spec.seed * 0x2545F4914F6CDD1Dull + static_cast<int>(move));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double sign = unit(rng) < 0.5 ? -1.0 : 1.0;
  const double speed = 2.0 + 4.0 * unit(rng);
  switch (move) {
    case CameraMove::kStatic: return Static(spec);
    case CameraMove::kPan: return Pan(spec, sign * speed, 0.3 * (unit(rng) - 0.5));
    case CameraMove::kTilt: return Pan(spec, 0.3 * (unit(rng) - 0.5), sign * speed);
    case CameraMove::kZoom: {
      const double rate = 1.015 + 0.015 * unit(rng);
      return Zoom(spec, sign > 0 ? rate : 1.0 / rate);
    }
    case CameraMove::kHandheld: return Handheld(spec, 3.0 + 3.0 * unit(rng));
    case CameraMove::kTruck:
    case CameraMove::kPedestal: {
      const double near = sign * (6.0 + 2.0 * unit(rng));
      return TwoPlane(spec, near, near / (3.0 + unit(rng)), move == CameraMove::kPedestal);
    }
    case CameraMove::kDolly: return TwoPlaneDolly(spec, 1.03 + 0.02 * unit(rng), 1.005);
    case CameraMove::kUnknown: break;
  }
  Fail(ErrorCode::kInvalidArgument, "no generator for camera move 'unknown'");
}

inline Image NoiseFrame(int width, int height, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Image img(width, height, 1);
  for (double& v : img.data()) v = unit(rng);
  return img;
}

// Fills `img` with a solid colour rectangle, clipped to the raster.
inline void FillRect(Image& img, const Rect& r, std::initializer_list<double> colour) {
  const int x0 = std::max(0, static_cast<int>(std::floor(r.x)));
  const int y0 = std::max(0, static_cast<int>(std::floor(r.y)));
  const int x1 = std::min(img.width(), static_cast<int>(std::ceil(r.x + r.w)));
  const int y1 = std::min(img.height(), static_cast<int>(std::ceil(r.y + r.h)));
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      int c = 0;
      for (double v : colour) {
        if (c < img.channels()) img.at(x, y, c++) = v;
      }
      for (; c < img.channels(); ++c) img.at(x, y, c) = *std::prev(colour.end());
    }
  }
}


// Glyph-like marks: a few strokes per character cell, so printed labels
// and handwriting give the corner detector plenty to hold on to.
inline void DrawGlyphs(Image& img, const Rect& area, double ink, std::mt19937_64& rng, double cell_w = 7.0,
                       double cell_h = 10.0) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (double y = area.y + 1; y + cell_h <= area.y + area.h; y += cell_h + 2) {
    for (double x = area.x + 1; x + cell_w <= area.x + area.w; x += cell_w + 1) {
      if (unit(rng) < 0.15) continue;  // word gap
      const int strokes = 2 + static_cast<int>(unit(rng) * 3);
      for (int k = 0; k < strokes; ++k) {
        if (unit(rng) < 0.5) {
          const double yy = y + (cell_h - 2) * unit(rng);
          FillRect(img, {x, std::floor(yy), cell_w - 1, 2}, {ink});
        } else {
          const double xx = x + (cell_w - 2) * unit(rng);
          FillRect(img, {std::floor(xx), y, 2, cell_h}, {ink});
        }
      }
    }
  }
}

// A clapperboard template: clapper stripes on top, printed labels, and
// empty value boxes for production, scene, shot, take, director, camera
// and date.
inline SlateTemplate MakeSlateTemplate(std::uint64_t seed, int width = 240, int height = 160) {
  std::mt19937_64 rng(seed);
  SlateTemplate t;
  t.template_id = "slate_" + std::to_string(seed);
  t.image = Image(width, height, 1, 0.12);
  Image& img = t.image;
  const double sx = width / 240.0, sy = height / 160.0;
  auto R = [&](double x, double y, double w, double h) { return Rect{x * sx, y * sy, w * sx, h * sy}; };
  // Clapper stripes.
  for (int x = 0; x < width; ++x) {
    for (int y = 0; y < static_cast<int>(24 * sy); ++y) {
      img.at(x, y) = ((x + y) / static_cast<int>(14 * sx)) % 2 ? 0.92 : 0.08;
    }
  }
  // Board outline and rules.
  for (const Rect& r : {R(2, 26, 236, 2), R(2, 156, 236, 2), R(2, 26, 2, 132), R(236, 26, 2, 132), R(2, 58, 236, 2),
                        R(2, 112, 236, 2), R(80, 58, 2, 54), R(160, 58, 2, 54), R(120, 112, 2, 46)}) {
    FillRect(img, r, {0.9});
  }
  // Printed labels.
  for (const Rect& r : {R(6, 30, 60, 11), R(6, 62, 40, 11), R(86, 62, 30, 11), R(166, 62, 30, 11), R(6, 116, 50, 11),
                        R(126, 116, 46, 11)}) {
    DrawGlyphs(img, r, 0.85, rng, 6.0 * sx, 9.0 * sy);
  }
  t.regions = {{"production", R(70, 30, 160, 24), ValueKind::kText},
               {"scene", R(8, 76, 68, 32), ValueKind::kInteger},
               {"shot", R(86, 76, 70, 32), ValueKind::kInteger},
               {"take", R(166, 76, 66, 32), ValueKind::kInteger},
               {"director", R(8, 130, 108, 24), ValueKind::kText},
               {"camera", R(126, 130, 50, 24), ValueKind::kText},
               {"date", R(180, 130, 52, 24), ValueKind::kText}};
  t.Validate();
  return t;
}

// The template as it appears on set: chalk handwriting in the value boxes.
inline Image FilledSlate(const SlateTemplate& t, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0xC0FFEE);
  Image img = t.image;
  for (const SlateRegion& r : t.regions) {
    const Rect inner{r.rect.x + 3, r.rect.y + 3, std::min(r.rect.w - 6, 40.0), r.rect.h - 6};
    DrawGlyphs(img, inner, 0.8, rng, r.value_kind == ValueKind::kInteger ? 9.0 : 7.0,
               r.value_kind == ValueKind::kInteger ? 14.0 : 10.0);
  }
  return img;
}

// Template-to-frame homography: a random similarity (scale 0.75-1.05,
// rotation within +-6 degrees) centred in the frame, with each template
// corner then jittered by up to `jitter` px.
inline Eigen::Matrix3d RandomPlacement(std::uint64_t seed, int tpl_w, int tpl_h, int frame_w, int frame_h,
                                       double jitter = 6.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double s = 0.75 + 0.30 * unit(rng);
  const double theta = (unit(rng) - 0.5) * 2.0 * 6.0 * std::numbers::pi / 180.0;
  const double slack_x = std::max(0.0, frame_w - s * tpl_w - 2 * jitter - 10);
  const double slack_y = std::max(0.0, frame_h - s * tpl_h - 2 * jitter - 10);
  const double cx = frame_w / 2.0 + (unit(rng) - 0.5) * slack_x;
  const double cy = frame_h / 2.0 + (unit(rng) - 0.5) * slack_y;
  const TransformModel sim = TransformModel::Similarity(s, theta, 0, 0);
  std::array<Point2, 4> src = {Point2{0, 0}, Point2{tpl_w - 1.0, 0}, Point2{tpl_w - 1.0, tpl_h - 1.0},
                               Point2{0, tpl_h - 1.0}};
  std::array<Point2, 4> dst;
  for (int i = 0; i < 4; ++i) {
    const Point2 p = sim.Apply(src[i] - Point2{tpl_w / 2.0, tpl_h / 2.0});
    dst[i] = {cx + p.x + (unit(rng) - 0.5) * 2 * jitter, cy + p.y + (unit(rng) - 0.5) * 2 * jitter};
  }
  return *detail::SolveHomography(src, dst);
}

// A frame with the slate `board` placed by `tpl_to_frame` over textured
// background, plus sensor noise.
inline Image SlateFrame(const Image& board, const Eigen::Matrix3d& tpl_to_frame, int width, int height,
                        std::uint64_t seed, double noise_sigma = 0.01) {
  Image frame = Render(Texture(seed + 101), width, height, Eigen::Matrix3d::Identity());
  PasteWarped(frame, board, tpl_to_frame);
  std::mt19937_64 rng(seed);
  AddNoise(frame, noise_sigma, rng);
  return frame;
}
}  // namespace cinemeta::synthetic

#endif  // CINEMETA_SYNTHETIC_HPP_
