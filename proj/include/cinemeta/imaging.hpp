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

// Per-frame pre-processing: Bayer demosaic, .cube LUT parsing and
// application, a parametric log-to-linear fallback curve, box downsampling,
// and colour-space helpers.

#ifndef CINEMETA_IMAGING_HPP_
#define CINEMETA_IMAGING_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cinemeta/image.hpp"
#include "cinemeta/metadata_model.hpp"

namespace cinemeta {

// ---------------------------------------------------------------------------
// Demosaic

// Bilinear demosaic. A site keeps its own sample for the channel its filter
// records; every other channel is the mean of the same-channel sites in its
// 3x3 neighbourhood, with coordinates clamped at the border (a clamped
// coordinate contributes the site it lands on, duplicates included).
inline Image DemosaicBilinear(const Image& raw, BayerPattern pattern) {
  if (raw.channels() != 1) Fail(ErrorCode::kChannelMismatch, "demosaic needs a single-channel mosaic");
  const int w = raw.width();
  const int h = raw.height();
  if (w % 2 != 0 || h % 2 != 0 || w < 2 || h < 2) {
    Fail(ErrorCode::kOddDimensions, "mosaic must have even width and height >= 2");
  }
  Image out(w, h, 3);
  // Each missing sample is the mean of the same-colour sites in its 3x3
  // neighbourhood (borders clamped, so edge sites repeat). The mean is
  // taken as offsets from the first site, so flat input stays bit-exact.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int own = BayerChannel(pattern, x, y);
      for (int c = 0; c < 3; ++c) {
        if (c == own) {
          out.at(x, y, c) = raw.at(x, y);
          continue;
        }
        double ref = 0.0, offset = 0.0;
        int n = 0;
        for (int dy = -1; dy <= 1; ++dy) {
          const int yy = std::clamp(y + dy, 0, h - 1);
          for (int dx = -1; dx <= 1; ++dx) {
            const int xx = std::clamp(x + dx, 0, w - 1);
            if (BayerChannel(pattern, xx, yy) != c) continue;
            if (n++ == 0) {
              ref = raw.at(xx, yy);
            } else {
              offset += raw.at(xx, yy) - ref;
            }
          }
        }
        out.at(x, y, c) = ref + offset / n;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// LUTs

struct Lut {
  enum class Kind { k1D, k3D };

  Kind kind = Kind::k1D;
  int size = 2;
  std::array<double, 3> domain_min{0, 0, 0};
  std::array<double, 3> domain_max{1, 1, 1};
  // 1D: `size` triples. 3D: size^3 triples, red index fastest.
  std::vector<std::array<double, 3>> entries;

  static Lut Identity3D(int size) {
    Lut lut;
    lut.kind = Kind::k3D;
    lut.size = size;
    for (int b = 0; b < size; ++b) {
      for (int g = 0; g < size; ++g) {
        for (int r = 0; r < size; ++r) {
          const double n = size - 1;
          lut.entries.push_back({r / n, g / n, b / n});
        }
      }
    }
    return lut;
  }

  // True when the table maps every input to itself: lattice entries equal
  // their own coordinates over the unit domain.
  bool IsIdentity() const {
    if (domain_min != std::array<double, 3>{0, 0, 0} || domain_max != std::array<double, 3>{1, 1, 1}) return false;
    const double n = size - 1;
    if (kind == Kind::k1D) {
      for (int i = 0; i < size; ++i) {
        if (entries[i] != std::array<double, 3>{i / n, i / n, i / n}) return false;
      }
      return true;
    }
    for (int b = 0; b < size; ++b) {
      for (int g = 0; g < size; ++g) {
        for (int r = 0; r < size; ++r) {
          if (At(r, g, b) != std::array<double, 3>{r / n, g / n, b / n}) return false;
        }
      }
    }
    return true;
  }

  const std::array<double, 3>& At(int r, int g, int b) const {
    return entries[(static_cast<std::size_t>(b) * size + g) * size + r];
  }
};

inline Lut ParseCube(std::string_view text) {
  Lut lut;
  bool have_size = false;
  std::size_t expected = 0;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string line(Trim(text.substr(pos, end - pos)));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream in(line);
    std::string keyword;
    in >> keyword;
    const std::string where = "cube line " + std::to_string(line_no);
    auto read_triple = [&](std::istringstream& s) {
      std::array<double, 3> t{};
      for (double& v : t) {
        if (!(s >> v)) Fail(ErrorCode::kBadValue, where + ": expected three numbers");
      }
      std::string rest;
      if (s >> rest) Fail(ErrorCode::kBadValue, where + ": trailing tokens");
      return t;
    };
    if (keyword == "TITLE") continue;
    if (keyword == "LUT_1D_SIZE" || keyword == "LUT_3D_SIZE") {
      int n = 0;
      if (!(in >> n) || n < 2 || n > 256) Fail(ErrorCode::kBadValue, where + ": invalid LUT size");
      if (have_size) Fail(ErrorCode::kBadValue, where + ": repeated size line");
      have_size = true;
      lut.size = n;
      lut.kind = keyword == "LUT_1D_SIZE" ? Lut::Kind::k1D : Lut::Kind::k3D;
      expected = lut.kind == Lut::Kind::k1D ? n : static_cast<std::size_t>(n) * n * n;
      continue;
    }
    if (keyword == "DOMAIN_MIN" || keyword == "DOMAIN_MAX" || keyword == "LUT_1D_INPUT_RANGE" ||
        keyword == "LUT_3D_INPUT_RANGE") {
      if (keyword.find("INPUT_RANGE") != std::string::npos) {
        double lo = 0, hi = 0;
        if (!(in >> lo >> hi)) Fail(ErrorCode::kBadValue, where + ": expected two numbers");
        lut.domain_min = {lo, lo, lo};
        lut.domain_max = {hi, hi, hi};
      } else {
        (keyword == "DOMAIN_MIN" ? lut.domain_min : lut.domain_max) = read_triple(in);
      }
      continue;
    }
    // Data line.
    if (!have_size) Fail(ErrorCode::kMissingSizeLine, where + ": data before LUT_1D_SIZE/LUT_3D_SIZE");
    std::istringstream data(line);
    const auto t = read_triple(data);
    for (double v : t) {
      if (!(v >= 0.0 && v <= 1.0)) {
        Fail(ErrorCode::kValueOutOfDomain, where + ": value " + FormatNumber(v) + " outside [0,1]");
      }
    }
    lut.entries.push_back(t);
  }
  if (!have_size) Fail(ErrorCode::kMissingSizeLine, "cube has no LUT_1D_SIZE/LUT_3D_SIZE line");
  if (lut.entries.size() != expected) {
    Fail(ErrorCode::kEntryCountMismatch, "expected " + std::to_string(expected) + " entries, got " +
                                             std::to_string(lut.entries.size()));
  }
  for (int c = 0; c < 3; ++c) {
    if (!(lut.domain_max[c] > lut.domain_min[c])) Fail(ErrorCode::kBadValue, "empty LUT domain");
  }
  return lut;
}

namespace detail {

// Grid coordinate of `v` on an n-point lattice over [lo, hi]: base index and
// fractional weight toward the next node.
inline std::pair<int, double> LatticePosition(double v, double lo, double hi, int n) {
  const double t = std::clamp((v - lo) / (hi - lo), 0.0, 1.0) * (n - 1);
  const int i = std::min(static_cast<int>(t), n - 2);
  return {i, t - i};
}

}  // namespace detail

inline std::array<double, 3> ApplyLut(const Lut& lut, const std::array<double, 3>& rgb) {
  std::array<double, 3> out{};
  if (lut.kind == Lut::Kind::k1D) {
    for (int c = 0; c < 3; ++c) {
      auto [i, f] = detail::LatticePosition(rgb[c], lut.domain_min[c], lut.domain_max[c], lut.size);
      out[c] = lut.entries[i][c] * (1 - f) + lut.entries[i + 1][c] * f;
    }
  } else {
    auto [ri, rf] = detail::LatticePosition(rgb[0], lut.domain_min[0], lut.domain_max[0], lut.size);
    auto [gi, gf] = detail::LatticePosition(rgb[1], lut.domain_min[1], lut.domain_max[1], lut.size);
    auto [bi, bf] = detail::LatticePosition(rgb[2], lut.domain_min[2], lut.domain_max[2], lut.size);
    for (int c = 0; c < 3; ++c) {
      // Collapse red, then green, then blue.
      double plane[2][2];
      for (int db = 0; db < 2; ++db) {
        for (int dg = 0; dg < 2; ++dg) {
          plane[db][dg] = lut.At(ri, gi + dg, bi + db)[c] * (1 - rf) + lut.At(ri + 1, gi + dg, bi + db)[c] * rf;
        }
      }
      const double lo = plane[0][0] * (1 - gf) + plane[0][1] * gf;
      const double hi = plane[1][0] * (1 - gf) + plane[1][1] * gf;
      out[c] = lo * (1 - bf) + hi * bf;
    }
  }
  for (double& v : out) v = std::clamp(v, 0.0, 1.0);
  return out;
}

// An identity table is a pass-through (clamped to the unit cube), so a
// neutral grade leaves pixel data bit-identical.
inline Image ApplyLut(const Image& img, const Lut& lut) {
  if (img.channels() != 3) Fail(ErrorCode::kChannelMismatch, "LUT application needs an RGB image");
  if (lut.IsIdentity()) {
    Image out = img;
    out.Clamp();
    return out;
  }
  Image out(img.width(), img.height(), 3);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const auto v = ApplyLut(lut, {img.at(x, y, 0), img.at(x, y, 1), img.at(x, y, 2)});
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = v[c];
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Log curve fallback: y = (a^x - 1) / (a^b - 1), clamped to [0,1].

struct LogCurveParams {
  double a = 10.0;
  double b = 1.0;
};

inline Image LogToLinear(const Image& img, LogCurveParams params) {
  if (!(params.a > 1.0) || !(params.b > 0.0) || !std::isfinite(params.a) || !std::isfinite(params.b)) {
    Fail(ErrorCode::kBadParams, "log curve needs a > 1 and b > 0");
  }
  if (img.channels() != 3) Fail(ErrorCode::kChannelMismatch, "log curve needs an RGB image");
  Image out = img;
  const double denom = std::pow(params.a, params.b) - 1.0;
  for (double& v : out.data()) v = std::clamp((std::pow(params.a, v) - 1.0) / denom, 0.0, 1.0);
  return out;
}

// ---------------------------------------------------------------------------
// Spatial

// Mean of each factor x factor block; trailing partial rows/columns dropped.
inline Image DownsampleBox(const Image& img, int factor) {
  if (factor < 1) Fail(ErrorCode::kInvalidArgument, "downsample factor must be >= 1");
  const int w = img.width() / factor;
  const int h = img.height() / factor;
  if (w == 0 || h == 0) Fail(ErrorCode::kFactorTooLarge, "downsample factor exceeds image size");
  if (factor == 1) return img;
  Image out(w, h, img.channels());
  const double inv = 1.0 / (static_cast<double>(factor) * factor);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < img.channels(); ++c) {
        double sum = 0.0;
        for (int dy = 0; dy < factor; ++dy) {
          for (int dx = 0; dx < factor; ++dx) sum += img.at(x * factor + dx, y * factor + dy, c);
        }
        out.at(x, y, c) = sum * inv;
      }
    }
  }
  return out;
}

inline Image FlipHorizontal(const Image& img) {
  Image out(img.width(), img.height(), img.channels());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < img.channels(); ++c) out.at(x, y, c) = img.at(img.width() - 1 - x, y, c);
    }
  }
  return out;
}

inline Image Transpose(const Image& img) {
  Image out(img.height(), img.width(), img.channels());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < img.channels(); ++c) out.at(y, x, c) = img.at(x, y, c);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Colour

struct Hsv {
  double h = 0;  // degrees in [0, 360)
  double s = 0;
  double v = 0;
};

inline Hsv RgbToHsv(double r, double g, double b) {
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double delta = mx - mn;
  Hsv out;
  out.v = mx;
  out.s = mx > 0.0 ? delta / mx : 0.0;
  if (delta <= 0.0) return out;
  double h;
  if (mx == r) {
    h = 60.0 * std::fmod((g - b) / delta, 6.0);
  } else if (mx == g) {
    h = 60.0 * ((b - r) / delta + 2.0);
  } else {
    h = 60.0 * ((r - g) / delta + 4.0);
  }
  if (h < 0.0) h += 360.0;
  if (h >= 360.0) h -= 360.0;
  out.h = h;
  return out;
}

inline std::array<double, 3> HsvToRgb(const Hsv& hsv) {
  const double c = hsv.v * hsv.s;
  const double hp = hsv.h / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) {
    r = c, g = x;
  } else if (hp < 2) {
    r = x, g = c;
  } else if (hp < 3) {
    g = c, b = x;
  } else if (hp < 4) {
    g = x, b = c;
  } else if (hp < 5) {
    r = x, b = c;
  } else {
    r = c, b = x;
  }
  const double m = hsv.v - c;
  return {r + m, g + m, b + m};
}

// Rec.601 luma.
inline Image ToGrayscale(const Image& img) {
  if (img.channels() == 1) return img;
  Image out(img.width(), img.height(), 1);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      out.at(x, y) = 0.299 * img.at(x, y, 0) + 0.587 * img.at(x, y, 1) + 0.114 * img.at(x, y, 2);
    }
  }
  return out;
}

}  // namespace cinemeta

#endif  // CINEMETA_IMAGING_HPP_
