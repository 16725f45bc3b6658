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

#ifndef MILROOT_SYNTHGEN_HPP_
#define MILROOT_SYNTHGEN_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "milroot/error.hpp"
#include "milroot/mask.hpp"
#include "milroot/raster.hpp"
#include "milroot/rng.hpp"

namespace milroot {

struct SynthParams {
  int height = 128;
  int width = 128;
  int n_roots = 2;  // 0 makes a negative image
  double width_min = 4.0;
  double width_max = 8.0;
  double length_min = 60.0;
  double length_max = 160.0;
  double curvature = 0.02;  // std of heading change per pixel step, radians
  std::array<double, 3> soil_rgb = {215.0, 145.0, 115.0};
  double brightness_offset = 15.0;  // minimum root-over-soil brightness
  double contrast_spread = 0.0;     // per-root offset factor drawn from [1, 1 + spread]
  double rim_width = 2.0;      // shadowed soil band around each root, pixels
  double rim_darkness = 0.3;
  double texture_scale = 12.0;  // value-noise cell size, pixels
  double texture_amplitude = 12.0;
  double stripe_amplitude = 6.0;
  double noise_sigma = 5.0;
  double soil_jitter = 12.0;  // per-image soil color std, per band
  int dark_spots = 30;
  double spot_radius_min = 1.5;
  double spot_radius_max = 2.5;
  double spot_darkness = 0.9;  // fraction of intensity removed at a spot
  std::uint64_t seed = 0;

  void validate() const {
    if (height < 32 || width < 32) throw Error("synthgen", "image sides must be >= 32");
    if (n_roots < 0 || dark_spots < 0) throw Error("synthgen", "counts must be >= 0");
    if (!(width_min >= 1.0 && width_max >= width_min)) throw Error("synthgen", "bad root widths");
    if (!(length_min > 0.0 && length_max >= length_min)) {
      throw Error("synthgen", "bad root lengths");
    }
    if (curvature < 0.0 || texture_amplitude < 0.0 || stripe_amplitude < 0.0 ||
        noise_sigma < 0.0 || soil_jitter < 0.0 || rim_width < 0.0 || brightness_offset < 0.0 ||
        contrast_spread < 0.0) {
      throw Error("synthgen", "amplitudes must be >= 0");
    }
    if (!(texture_scale > 0.0)) throw Error("synthgen", "texture_scale must be > 0");
    if (!(spot_radius_min > 0.0 && spot_radius_max >= spot_radius_min)) {
      throw Error("synthgen", "bad spot radii");
    }
    if (!(spot_darkness >= 0.0 && spot_darkness <= 1.0 && rim_darkness >= 0.0 &&
          rim_darkness <= 1.0)) {
      throw Error("synthgen", "darkness factors must be in [0, 1]");
    }
    for (double v : soil_rgb) {
      if (!(v > 0.0 && v <= 255.0)) throw Error("synthgen", "soil color must be in (0, 255]");
    }
  }
};

struct SynthImage {
  RasterImage image;
  BinaryMask mask;
  int label = 0;
};

inline constexpr std::array<double, 3> kRootTint = {8.0, 4.0, 0.0};

namespace detail {

// Smoothly interpolated lattice noise in [-1, 1].
class ValueNoise {
 public:
  ValueNoise(int height, int width, double cell, Rng& rng) : cell_(cell) {
    rows_ = static_cast<int>(std::ceil(height / cell)) + 2;
    cols_ = static_cast<int>(std::ceil(width / cell)) + 2;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    lattice_.resize(static_cast<std::size_t>(rows_) * cols_);
    for (auto& v : lattice_) v = u(rng);
  }

  double operator()(double r, double c) const {
    const double y = r / cell_, x = c / cell_;
    const int y0 = static_cast<int>(std::floor(y)), x0 = static_cast<int>(std::floor(x));
    const double fy = smooth(y - y0), fx = smooth(x - x0);
    const double a = at(y0, x0), b = at(y0, x0 + 1);
    const double d = at(y0 + 1, x0), e = at(y0 + 1, x0 + 1);
    return (a + (b - a) * fx) * (1.0 - fy) + (d + (e - d) * fx) * fy;
  }

 private:
  static double smooth(double t) { return t * t * (3.0 - 2.0 * t); }
  double at(int r, int c) const { return lattice_[static_cast<std::size_t>(r) * cols_ + c]; }

  double cell_;
  int rows_ = 0, cols_ = 0;
  std::vector<double> lattice_;
};

struct Point {
  double r, c;
};

// Random-walk centerline of `length` pixels grown both ways from a center.
inline std::vector<Point> root_curve(Point center, double heading, double length,
                                     double curvature, Rng& rng) {
  std::normal_distribution<double> turn(0.0, curvature);
  const int half = static_cast<int>(std::lround(length / 2.0));
  std::vector<Point> fwd, back;
  for (int dir = 0; dir < 2; ++dir) {
    auto& out = dir == 0 ? fwd : back;
    double th = heading + (dir == 0 ? 0.0 : std::numbers::pi);
    Point p = center;
    for (int s = 0; s < half; ++s) {
      th += turn(rng);
      p.r += std::sin(th);
      p.c += std::cos(th);
      out.push_back(p);
    }
  }
  std::vector<Point> curve(back.rbegin(), back.rend());
  curve.push_back(center);
  curve.insert(curve.end(), fwd.begin(), fwd.end());
  return curve;
}

// Pixels whose centers lie within radius of some curve sample.
template <class F>
void stamp(const std::vector<Point>& curve, double radius, int h, int w, F&& visit) {
  const double r2 = radius * radius;
  for (const auto& p : curve) {
    const int r0 = static_cast<int>(std::floor(p.r - radius));
    const int r1 = static_cast<int>(std::ceil(p.r + radius));
    const int c0 = static_cast<int>(std::floor(p.c - radius));
    const int c1 = static_cast<int>(std::ceil(p.c + radius));
    for (int r = std::max(0, r0); r <= std::min(h - 1, r1); ++r) {
      for (int c = std::max(0, c0); c <= std::min(w - 1, c1); ++c) {
        const double dr = r - p.r, dc = c - p.c;
        if (dr * dr + dc * dc <= r2) visit(r, c);
      }
    }
  }
}

}  // namespace detail

/// Seeded minirhizotron-like image: textured brown soil, bright desaturated
/// roots, dark specks, column stripes and sensor noise. Values are rounded
/// to integers in [0, 255].
inline SynthImage generate_image(const SynthParams& p) {
  p.validate();
  const int h = p.height, w = p.width;
  Rng soil_rng(derive_seed(p.seed, 0, "synth-soil"));
  Rng root_rng(derive_seed(p.seed, 0, "synth-roots"));
  Rng spot_rng(derive_seed(p.seed, 0, "synth-spots"));
  Rng noise_rng(derive_seed(p.seed, 0, "synth-noise"));

  std::normal_distribution<double> jitter(0.0, 1.0);
  std::array<double, 3> soil{};
  for (int b = 0; b < 3; ++b) soil[b] = p.soil_rgb[b] + p.soil_jitter * jitter(soil_rng);
  const detail::ValueNoise coarse(h, w, p.texture_scale, soil_rng);
  const detail::ValueNoise fine(h, w, p.texture_scale / 3.0, soil_rng);

  SynthImage out{RasterImage(h, w), BinaryMask(h, w), p.n_roots > 0 ? 1 : 0};
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double t = 0.7 * coarse(r, c) + 0.3 * fine(r, c);
      for (int b = 0; b < 3; ++b) {
        out.image.at(r, c, b) = soil[b] + p.texture_amplitude * t * soil[b] / p.soil_rgb[0];
      }
    }
  }

  // Roots: non-overlapping curves kept inside the frame.
  const double soil_max = *std::max_element(soil.begin(), soil.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  BinaryMask keepout(h, w);
  std::vector<std::pair<std::vector<detail::Point>, double>> curves;
  for (int k = 0; k < p.n_roots; ++k) {
    const double width = p.width_min + (p.width_max - p.width_min) * unit(root_rng);
    double length = p.length_min + (p.length_max - p.length_min) * unit(root_rng);
    const double radius = width / 2.0;
    const double root_level = soil_max + p.brightness_offset * (1.0 + p.contrast_spread * unit(root_rng));
    for (int attempt = 0; attempt < 400; ++attempt) {
      if (attempt > 0 && attempt % 50 == 0) length = std::max(p.length_min, 0.85 * length);
      const detail::Point center{h * unit(root_rng), w * unit(root_rng)};
      const double heading = 2.0 * std::numbers::pi * unit(root_rng);
      auto curve = detail::root_curve(center, heading, length, p.curvature, root_rng);
      const bool inside = std::all_of(curve.begin(), curve.end(), [&](const detail::Point& q) {
        return q.r >= radius && q.c >= radius && q.r <= h - 1 - radius && q.c <= w - 1 - radius;
      });
      if (!inside) continue;
      bool clash = false;
      detail::stamp(curve, radius, h, w, [&](int r, int c) { clash = clash || keepout.at(r, c); });
      if (clash) continue;
      const double shade = 1.0 + 0.04 * jitter(root_rng);
      detail::stamp(curve, radius, h, w, [&](int r, int c) {
        out.mask.at(r, c) = 1;
        for (int b = 0; b < 3; ++b) out.image.at(r, c, b) = (root_level + kRootTint[b]) * shade;
      });
      curves.push_back({std::move(curve), radius});
      detail::stamp(curves.back().first, radius + 4.0, h, w, [&](int r, int c) { keepout.at(r, c) = 1; });
      break;
    }
  }

  BinaryMask rim(h, w);
  for (const auto& [curve, radius] : curves) {
    detail::stamp(curve, radius + p.rim_width, h, w, [&](int r, int c) { rim.at(r, c) = !out.mask.at(r, c); });
  }
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!rim.at(r, c)) continue;
      for (int b = 0; b < 3; ++b) out.image.at(r, c, b) *= 1.0 - p.rim_darkness;
    }
  }

  // Dark specks on soil only.
  for (int k = 0; k < p.dark_spots; ++k) {
    const double rad = p.spot_radius_min + (p.spot_radius_max - p.spot_radius_min) * unit(spot_rng);
    const std::vector<detail::Point> at{{h * unit(spot_rng), w * unit(spot_rng)}};
    detail::stamp(at, rad, h, w, [&](int r, int c) {
      if (out.mask.at(r, c)) return;
      for (int b = 0; b < 3; ++b) out.image.at(r, c, b) *= 1.0 - p.spot_darkness;
    });
  }

  std::vector<double> stripe(w);
  for (auto& s : stripe) s = p.stripe_amplitude * jitter(noise_rng);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      for (int b = 0; b < 3; ++b) {
        const double v = out.image.at(r, c, b) + stripe[c] + p.noise_sigma * noise(noise_rng);
        out.image.at(r, c, b) = std::clamp(std::round(v), 0.0, 255.0);
      }
    }
  }
  return out;
}

}  // namespace milroot

#endif  // MILROOT_SYNTHGEN_HPP_
