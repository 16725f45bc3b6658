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

#ifndef MILROOT_FEATURES_HPP_
#define MILROOT_FEATURES_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "milroot/error.hpp"
#include "milroot/raster.hpp"
#include "milroot/superpixels.hpp"

namespace milroot {

inline constexpr std::size_t kFeatureCount = 18;

// Fixed feature order shared by training, prediction and signature reports.
enum Feature : std::size_t {
  kMeanR, kMeanG, kMeanB, kMeanL, kMeanA, kMeanLabB,
  kVarR, kVarG, kVarB, kVarL, kVarA, kVarLabB,
  kEntropyR, kEntropyG, kEntropyB, kEntropyL, kEntropyA, kEntropyLabB,
};

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "mean-R", "mean-G", "mean-B", "mean-L", "mean-a", "mean-b",
    "var-R",  "var-G",  "var-B",  "var-L",  "var-a",  "var-b",
    "H-R",    "H-G",    "H-B",    "H-L",    "H-a",    "H-b",
};

using FeatureVector = std::array<double, kFeatureCount>;

/// One superpixel descriptor.
struct Instance {
  FeatureVector values{};
  // mean-G before scaling; the bag downsampler bins on it.
  double raw_mean_green = 0.0;
  int superpixel = -1;
  std::string image;
};

struct FeatureScale {
  FeatureVector scales{};
};

/// Ordered subset of feature indices used by a model.
class FeatureMask {
 public:
  FeatureMask() : FeatureMask(all()) {}
  explicit FeatureMask(std::vector<std::size_t> indices) : indices_(std::move(indices)) {
    if (indices_.empty()) throw Error("features", "feature mask is empty");
    for (std::size_t i : indices_) {
      if (i >= kFeatureCount) throw Error("features", "feature index out of range");
    }
  }

  static FeatureMask all() {
    std::vector<std::size_t> idx(kFeatureCount);
    for (std::size_t i = 0; i < kFeatureCount; ++i) idx[i] = i;
    return FeatureMask(std::move(idx));
  }
  // Everything except mean-b.
  static FeatureMask without_mean_b() {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      if (i != kMeanLabB) idx.push_back(i);
    }
    return FeatureMask(std::move(idx));
  }
  // Bands with large, stable signature weights. The second variance is
  // read as var-G; use an explicit index list for the literal var-B reading.
  static FeatureMask nine() {
    return FeatureMask({kMeanR, kMeanG, kMeanB, kMeanL, kVarR, kVarG, kVarB, kEntropyA,
                        kEntropyLabB});
  }

  // Accepts "all", "18", "17", "9", or a comma-separated list of feature
  // names or indices.
  static FeatureMask parse(std::string_view spec) {
    if (spec == "all" || spec == "18") return all();
    if (spec == "17") return without_mean_b();
    if (spec == "9") return nine();
    std::vector<std::size_t> idx;
    std::stringstream ss{std::string(spec)};
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      const auto it = std::find(kFeatureNames.begin(), kFeatureNames.end(), tok);
      if (it != kFeatureNames.end()) {
        idx.push_back(static_cast<std::size_t>(it - kFeatureNames.begin()));
      } else {
        try {
          idx.push_back(std::stoul(tok));
        } catch (const std::exception&) {
          throw Error("features", "unknown feature '" + tok + "'");
        }
      }
    }
    return FeatureMask(std::move(idx));
  }

  const std::vector<std::size_t>& indices() const noexcept { return indices_; }
  std::size_t size() const noexcept { return indices_.size(); }

  std::vector<double> project(const FeatureVector& v) const {
    std::vector<double> out(indices_.size());
    for (std::size_t k = 0; k < indices_.size(); ++k) out[k] = v[indices_[k]];
    return out;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (std::size_t i : indices_) out.emplace_back(kFeatureNames[i]);
    return out;
  }

  friend bool operator==(const FeatureMask&, const FeatureMask&) = default;

 private:
  std::vector<std::size_t> indices_;
};

namespace detail {

inline int histogram_bin(double v) {
  return static_cast<int>(std::clamp(std::round(v), 0.0, 255.0));
}

inline double shannon_entropy_bits(const std::array<std::size_t, 256>& hist, std::size_t total) {
  double h = 0.0;
  for (std::size_t count : hist) {
    if (count == 0) continue;
    const double p = static_cast<double>(count) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

}  // namespace detail

/// Mean, population variance and 256-bin Shannon entropy (bits) of each RGB
/// and LAB band over every superpixel. LAB bands are mapped onto [0, 255]
/// for the histogram (L * 2.55, a + 128, b + 128).
inline std::vector<Instance> extract_features(const RasterImage& image, const LabImage& lab,
                                              const SuperpixelMap& spmap,
                                              const std::string& image_id = {}) {
  if (spmap.height != image.height() || spmap.width != image.width() ||
      lab.height() != image.height() || lab.width() != image.width()) {
    throw Error("features", "superpixel map or LAB image does not match the image shape");
  }
  std::vector<Instance> out;
  out.reserve(spmap.count);
  for (int id = 0; id < spmap.count; ++id) {
    const auto& px = spmap.members[id];
    const double n = static_cast<double>(px.size());
    Instance inst;
    inst.superpixel = id;
    inst.image = image_id;
    for (int band = 0; band < 6; ++band) {
      auto value = [&](const Pixel& p) {
        return band < 3 ? image.at(p.row, p.col, band) : lab.at(p.row, p.col, band - 3);
      };
      auto to_byte = [&](double v) {
        switch (band) {
          case 3: return v * 2.55;
          case 4:
          case 5: return v + 128.0;
          default: return v;
        }
      };
      double sum = 0.0;
      for (const auto& p : px) sum += value(p);
      const double mean = sum / n;
      double sq = 0.0;
      std::array<std::size_t, 256> hist{};
      for (const auto& p : px) {
        const double v = value(p);
        sq += (v - mean) * (v - mean);
        ++hist[detail::histogram_bin(to_byte(v))];
      }
      inst.values[band] = mean;
      inst.values[6 + band] = sq / n;
      inst.values[12 + band] = detail::shannon_entropy_bits(hist, px.size());
    }
    inst.raw_mean_green = inst.values[kMeanG];
    out.push_back(std::move(inst));
  }
  return out;
}

/// Smallest power of ten >= |m|; 1 when m == 0.
inline double order_of_magnitude_scale(double m) {
  m = std::abs(m);
  if (m == 0.0 || !std::isfinite(m)) return 1.0;
  int p = static_cast<int>(std::ceil(std::log10(m)));
  while (std::pow(10.0, p - 1) >= m) --p;
  while (std::pow(10.0, p) < m) ++p;
  return std::pow(10.0, p);
}

/// Per-image scaling: every feature is divided by the order of magnitude of
/// its largest absolute value over the image's instances.
inline FeatureScale compute_feature_scale(const std::vector<Instance>& instances) {
  FeatureScale scale;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    double m = 0.0;
    for (const auto& inst : instances) m = std::max(m, std::abs(inst.values[i]));
    scale.scales[i] = order_of_magnitude_scale(m);
  }
  return scale;
}

inline void apply_feature_scale(std::vector<Instance>& instances, const FeatureScale& scale) {
  for (auto& inst : instances) {
    for (std::size_t i = 0; i < kFeatureCount; ++i) inst.values[i] /= scale.scales[i];
  }
}

inline std::pair<std::vector<Instance>, FeatureScale> scale_features(
    std::vector<Instance> instances) {
  if (instances.empty()) throw Error("features", "cannot scale an empty instance list");
  FeatureScale scale = compute_feature_scale(instances);
  apply_feature_scale(instances, scale);
  return {std::move(instances), scale};
}

/// CSV: image,superpixel,<18 feature names>.
inline std::string instances_to_csv(const std::vector<Instance>& instances) {
  std::ostringstream os;
  os.precision(17);
  os << "image,superpixel";
  for (auto name : kFeatureNames) os << ',' << name;
  os << '\n';
  for (const auto& inst : instances) {
    os << inst.image << ',' << inst.superpixel;
    for (double v : inst.values) os << ',' << v;
    os << '\n';
  }
  return os.str();
}

}  // namespace milroot

#endif  // MILROOT_FEATURES_HPP_
