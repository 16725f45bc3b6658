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

#ifndef MILROOT_POSTPROC_HPP_
#define MILROOT_POSTPROC_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "milroot/error.hpp"
#include "milroot/mask.hpp"
#include "milroot/superpixels.hpp"

namespace milroot {

/// Per-pixel confidence, row-major.
struct ConfidenceMap {
  int height = 0;
  int width = 0;
  std::vector<double> values;

  ConfidenceMap() = default;
  ConfidenceMap(int h, int w, double fill = 0.0)
      : height(h), width(w), values(static_cast<std::size_t>(h) * w, fill) {}

  double& at(int r, int c) { return values[static_cast<std::size_t>(r) * width + c]; }
  double at(int r, int c) const { return values[static_cast<std::size_t>(r) * width + c]; }

  void validate() const {
    if (height < 1 || width < 1 || values.size() != static_cast<std::size_t>(height) * width) {
      throw Error("postproc", "confidence map shape is inconsistent");
    }
    for (double v : values) {
      if (!std::isfinite(v)) throw Error("postproc", "confidence map has non-finite values");
    }
  }

  friend bool operator==(const ConfidenceMap&, const ConfidenceMap&) = default;
};

/// Superpixel confidences copied to their member pixels.
inline ConfidenceMap broadcast_confidence(const SuperpixelMap& spmap,
                                          std::span<const double> per_superpixel) {
  if (per_superpixel.size() != static_cast<std::size_t>(spmap.count)) {
    throw Error("postproc", "one confidence per superpixel required");
  }
  ConfidenceMap map(spmap.height, spmap.width);
  for (std::size_t p = 0; p < map.values.size(); ++p) {
    map.values[p] = per_superpixel[static_cast<std::size_t>(spmap.labels[p])];
  }
  return map;
}

/// Smallest threshold whose pooled false positive rate (confidence > theta
/// over non-root pixels) is at most target_fpr.
inline double select_threshold_for_fpr(std::vector<double> negatives, double target_fpr) {
  if (!(target_fpr > 0.0 && target_fpr < 1.0)) {
    throw Error("postproc", "target FPR must lie in (0, 1)");
  }
  if (negatives.empty()) throw Error("postproc", "no negative pixels");
  const auto n = negatives.size();
  const auto k = static_cast<std::size_t>(
      std::floor(target_fpr * static_cast<double>(n) + 1e-9));
  if (k >= n) return *std::min_element(negatives.begin(), negatives.end());
  // k-th largest value: exactly k or fewer negatives lie strictly above it.
  std::nth_element(negatives.begin(), negatives.begin() + static_cast<std::ptrdiff_t>(k),
                   negatives.end(), std::greater<>());
  return negatives[k];
}

inline double select_threshold_for_fpr(const std::vector<ConfidenceMap>& maps,
                                       const std::vector<BinaryMask>& gt, double target_fpr) {
  if (maps.size() != gt.size()) throw Error("postproc", "one mask per confidence map required");
  std::vector<double> negatives;
  for (std::size_t m = 0; m < maps.size(); ++m) {
    check_same_shape(maps[m].height, maps[m].width, gt[m], "postproc");
    for (std::size_t p = 0; p < maps[m].values.size(); ++p) {
      if (gt[m].data[p] == 0) negatives.push_back(maps[m].values[p]);
    }
  }
  return select_threshold_for_fpr(std::move(negatives), target_fpr);
}

inline BinaryMask binarize(const ConfidenceMap& map, double theta) {
  BinaryMask out(map.height, map.width);
  for (std::size_t p = 0; p < map.values.size(); ++p) out.data[p] = map.values[p] > theta ? 1 : 0;
  return out;
}

struct ComponentStats {
  int id = 0;
  std::size_t size = 0;
  double eccentricity = 0.0;
  std::vector<Pixel> pixels;
};

/// Eccentricity of the ellipse with the same second central moments as the
/// pixel set (population covariance of the coordinates).
inline double component_eccentricity(std::span<const Pixel> pixels) {
  if (pixels.empty()) throw Error("postproc", "component has no pixels");
  const double n = static_cast<double>(pixels.size());
  double mr = 0.0, mc = 0.0;
  for (const auto& p : pixels) mr += p.row, mc += p.col;
  mr /= n;
  mc /= n;
  double srr = 0.0, scc = 0.0, src = 0.0;
  for (const auto& p : pixels) {
    const double dr = p.row - mr, dc = p.col - mc;
    srr += dr * dr;
    scc += dc * dc;
    src += dr * dc;
  }
  srr /= n;
  scc /= n;
  src /= n;
  const double half_trace = 0.5 * (srr + scc);
  const double disc = std::sqrt(0.25 * (srr - scc) * (srr - scc) + src * src);
  const double l1 = half_trace + disc;
  const double l2 = std::max(0.0, half_trace - disc);
  if (!(l1 > 0.0)) return 0.0;
  return std::sqrt(std::clamp(1.0 - l2 / l1, 0.0, 1.0));
}

/// 8-connected components, numbered in raster order of their first pixel.
inline std::vector<ComponentStats> connected_components(const BinaryMask& mask) {
  std::vector<ComponentStats> out;
  std::vector<int> seen(mask.data.size(), 0);
  std::vector<Pixel> stack;
  for (int r = 0; r < mask.height; ++r) {
    for (int c = 0; c < mask.width; ++c) {
      const auto start = static_cast<std::size_t>(r) * mask.width + c;
      if (mask.data[start] == 0 || seen[start]) continue;
      ComponentStats comp;
      comp.id = static_cast<int>(out.size());
      seen[start] = 1;
      stack.push_back({r, c});
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        comp.pixels.push_back(p);
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int rr = p.row + dr, cc = p.col + dc;
            if (rr < 0 || cc < 0 || rr >= mask.height || cc >= mask.width) continue;
            const auto q = static_cast<std::size_t>(rr) * mask.width + cc;
            if (mask.data[q] == 0 || seen[q]) continue;
            seen[q] = 1;
            stack.push_back({rr, cc});
          }
        }
      }
      std::sort(comp.pixels.begin(), comp.pixels.end(), [](const Pixel& a, const Pixel& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
      });
      comp.size = comp.pixels.size();
      comp.eccentricity = component_eccentricity(comp.pixels);
      out.push_back(std::move(comp));
    }
  }
  return out;
}

/// kEither removes a component failing either test; kBoth only one failing both.
enum class FilterMode { kEither, kBoth };

inline std::string_view to_string(FilterMode m) {
  return m == FilterMode::kEither ? "either" : "both";
}

inline FilterMode parse_filter_mode(std::string_view s) {
  if (s == "either" || s == "or") return FilterMode::kEither;
  if (s == "both" || s == "and") return FilterMode::kBoth;
  throw Error("postproc", "unknown filter mode '" + std::string(s) + "'");
}

struct FilterOptions {
  double min_size = 300.0;
  double min_ecc = 0.95;
  FilterMode mode = FilterMode::kEither;
};

inline BinaryMask filter_components(const BinaryMask& mask, const FilterOptions& opt) {
  BinaryMask out(mask.height, mask.width);
  for (const auto& comp : connected_components(mask)) {
    const bool small = static_cast<double>(comp.size) < opt.min_size;
    const bool round = comp.eccentricity < opt.min_ecc;
    const bool remove = opt.mode == FilterMode::kEither ? (small || round) : (small && round);
    if (remove) continue;
    for (const auto& p : comp.pixels) out.at(p.row, p.col) = 1;
  }
  return out;
}

inline BinaryMask filter_components(const BinaryMask& mask, double min_size, double min_ecc) {
  return filter_components(mask, FilterOptions{min_size, min_ecc, FilterMode::kEither});
}

}  // namespace milroot

#endif  // MILROOT_POSTPROC_HPP_
