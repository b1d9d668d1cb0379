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

// Binary PGM (P5) and PPM (P6) rasters, 8- or 16-bit (big-endian).

#ifndef CINEMETA_FORMATS_RASTER_HPP_
#define CINEMETA_FORMATS_RASTER_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cinemeta/image.hpp"
#include "cinemeta/io.hpp"

namespace cinemeta {

namespace detail {

// Header integers; -1 when empty or absurdly long.
inline long ParseUnsignedHeader(std::string_view digits) {
  if (digits.empty() || digits.size() > 9) return -1;
  long v = 0;
  for (char c : digits) v = v * 10 + (c - '0');
  return v;
}

}  // namespace detail

struct RasterFile {
  int width = 0;
  int height = 0;
  int channels = 1;
  int max_value = 255;
  std::vector<std::uint16_t> samples;

  bool operator==(const RasterFile&) const = default;
};

inline RasterFile ParseRaster(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6')) {
    Fail(ErrorCode::kBadMagic, "not a binary PGM/PPM (P5/P6)");
  }
  RasterFile r;
  r.channels = bytes[1] == '5' ? 1 : 3;
  std::size_t pos = 2;
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  auto read_int = [&]() -> long {
    while (pos < bytes.size()) {
      if (is_space(bytes[pos])) {
        ++pos;
      } else if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
    const std::size_t start = pos;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') ++pos;
    auto v = detail::ParseUnsignedHeader(bytes.substr(start, pos - start));
    if (v < 0) Fail(ErrorCode::kTruncatedPayload, "malformed raster header");
    return v;
  };
  const long w = read_int();
  const long h = read_int();
  const long maxval = read_int();
  if (w <= 0 || h <= 0 || w > 1 << 16 || h > 1 << 16) {
    Fail(ErrorCode::kTruncatedPayload, "invalid raster dimensions");
  }
  if (maxval != 255 && maxval != 65535) {
    Fail(ErrorCode::kUnsupportedMaxValue, "max value " + std::to_string(maxval) + " (need 255 or 65535)");
  }
  if (pos >= bytes.size() || !is_space(bytes[pos])) {
    Fail(ErrorCode::kTruncatedPayload, "raster header not terminated");
  }
  ++pos;
  r.width = static_cast<int>(w);
  r.height = static_cast<int>(h);
  r.max_value = static_cast<int>(maxval);
  const std::size_t count = static_cast<std::size_t>(w) * h * r.channels;
  const std::size_t bytes_per = r.max_value == 255 ? 1 : 2;
  if (bytes.size() - pos < count * bytes_per) {
    Fail(ErrorCode::kTruncatedPayload, "expected " + std::to_string(count * bytes_per) +
                                           " payload bytes, got " + std::to_string(bytes.size() - pos));
  }
  r.samples.resize(count);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
  for (std::size_t k = 0; k < count; ++k) {
    r.samples[k] = bytes_per == 1 ? p[k] : static_cast<std::uint16_t>((p[2 * k] << 8) | p[2 * k + 1]);
  }
  return r;
}

inline std::string SerializeRaster(const RasterFile& r) {
  if (r.channels != 1 && r.channels != 3) Fail(ErrorCode::kInvalidArgument, "raster channels must be 1 or 3");
  if (r.max_value != 255 && r.max_value != 65535) {
    Fail(ErrorCode::kUnsupportedMaxValue, "max value " + std::to_string(r.max_value));
  }
  if (r.samples.size() != static_cast<std::size_t>(r.width) * r.height * r.channels) {
    Fail(ErrorCode::kInvalidArgument, "raster sample count mismatch");
  }
  std::string out = r.channels == 1 ? "P5\n" : "P6\n";
  out += std::to_string(r.width) + ' ' + std::to_string(r.height) + '\n' + std::to_string(r.max_value) + '\n';
  for (std::uint16_t s : r.samples) {
    if (r.max_value == 255) {
      out += static_cast<char>(s & 0xff);
    } else {
      out += static_cast<char>(s >> 8);
      out += static_cast<char>(s & 0xff);
    }
  }
  return out;
}

inline RasterFile ReadRaster(const fs::path& path) {
  try {
    return ParseRaster(ReadFile(path));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kIo) throw;
    Fail(e.code(), path.string() + ": " + e.what());
  }
}

inline void WriteRaster(const RasterFile& r, const fs::path& path) {
  WriteFileAtomic(path, SerializeRaster(r));
}

inline Image ToImage(const RasterFile& r) {
  Image img(r.width, r.height, r.channels);
  const double scale = 1.0 / r.max_value;
  auto data = img.data();
  for (std::size_t k = 0; k < r.samples.size(); ++k) data[k] = r.samples[k] * scale;
  return img;
}

inline RasterFile FromImage(const Image& img, int max_value = 255) {
  RasterFile r;
  r.width = img.width();
  r.height = img.height();
  r.channels = img.channels();
  r.max_value = max_value;
  r.samples.reserve(img.data().size());
  for (double v : img.data()) {
    r.samples.push_back(static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * max_value)));
  }
  return r;
}

inline Image LoadImage(const fs::path& path) { return ToImage(ReadRaster(path)); }

inline void SaveImage(const Image& img, const fs::path& path, int max_value = 255) {
  WriteRaster(FromImage(img, max_value), path);
}

}  // namespace cinemeta

#endif  // CINEMETA_FORMATS_RASTER_HPP_
