// Copyright 2026 The milroot Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MILROOT_RASTER_HPP_
#define MILROOT_RASTER_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "milroot/error.hpp"

namespace milroot {

/// Three-band image of doubles stored band-interleaved, row-major.
///
/// The color space is carried by `Tag` so RGB rasters and their LAB
/// conversions cannot be mixed up at call sites.
template <class Tag>
class Image3 {
 public:
  static constexpr int kBands = 3;

  Image3() = default;
  Image3(int height, int width, double fill = 0.0) : height_(height), width_(width) {
    if (height < 1 || width < 1) {
      throw Error("raster", "image dimensions must be positive, got " + std::to_string(height) +
                                "x" + std::to_string(width));
    }
    values_.assign(static_cast<std::size_t>(height) * width * kBands, fill);
  }

  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(height_) * width_; }
  bool empty() const noexcept { return values_.empty(); }

  double& at(int row, int col, int band) noexcept { return values_[index(row, col, band)]; }
  double at(int row, int col, int band) const noexcept { return values_[index(row, col, band)]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  // Throws unless every value is finite.
  void validate() const {
    if (empty()) throw Error("raster", "empty image");
    for (double v : values_) {
      if (!std::isfinite(v)) throw Error("raster", "non-finite pixel value");
    }
  }

  friend bool operator==(const Image3&, const Image3&) = default;

 private:
  std::size_t index(int row, int col, int band) const noexcept {
    return (static_cast<std::size_t>(row) * width_ + col) * kBands + band;
  }

  int height_ = 0;
  int width_ = 0;
  std::vector<double> values_;
};

struct RgbTag {};
struct LabTag {};

/// RGB raster on the [0, 255] scale, possibly out of range after destriping.
using RasterImage = Image3<RgbTag>;
/// CIELAB raster: L in [0, 100], a and b roughly [-128, 127].
using LabImage = Image3<LabTag>;

/// Removes per-column offsets: out = in - columnMean(col, band) + globalMean(band).
/// No clamping; values may leave [0, 255].
inline RasterImage destripe(const RasterImage& image) {
  const int h = image.height();
  const int w = image.width();
  RasterImage out = image;
  for (int b = 0; b < RasterImage::kBands; ++b) {
    std::vector<double> column_mean(w, 0.0);
    double global = 0.0;
    for (int c = 0; c < w; ++c) {
      double s = 0.0;
      for (int r = 0; r < h; ++r) s += image.at(r, c, b);
      column_mean[c] = s / h;
      global += s;
    }
    global /= static_cast<double>(h) * w;
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) out.at(r, c, b) = image.at(r, c, b) - column_mean[c] + global;
    }
  }
  return out;
}

namespace detail {

inline double srgb_to_linear(double v) {
  v = std::clamp(v, 0.0, 255.0) / 255.0;
  return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

inline double lab_f(double t) {
  constexpr double delta = 6.0 / 29.0;
  return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

}  // namespace detail

// D65 reference white of the sRGB primaries.
inline constexpr std::array<double, 3> kD65White = {0.9504700, 1.0, 1.0888300};

/// Converts one sRGB pixel (components clamped to [0, 255]) to CIELAB under D65.
inline std::array<double, 3> srgb_to_lab(double r, double g, double b) {
  const double rl = detail::srgb_to_linear(r);
  const double gl = detail::srgb_to_linear(g);
  const double bl = detail::srgb_to_linear(b);
  const double x = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl;
  const double y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl;
  const double z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl;
  const double fx = detail::lab_f(x / kD65White[0]);
  const double fy = detail::lab_f(y / kD65White[1]);
  const double fz = detail::lab_f(z / kD65White[2]);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

inline LabImage rgb_to_lab(const RasterImage& image) {
  LabImage lab(image.height(), image.width());
  for (int r = 0; r < image.height(); ++r) {
    for (int c = 0; c < image.width(); ++c) {
      const auto v = srgb_to_lab(image.at(r, c, 0), image.at(r, c, 1), image.at(r, c, 2));
      for (int b = 0; b < 3; ++b) lab.at(r, c, b) = v[b];
    }
  }
  return lab;
}

// Color convention recorded in output metadata.
inline constexpr const char* kLabConvention = "sRGB companding, D65 white, CIE 1976 L*a*b*";

}  // namespace milroot

#endif  // MILROOT_RASTER_HPP_
