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

#ifndef MILROOT_BAGS_HPP_
#define MILROOT_BAGS_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "milroot/error.hpp"
#include "milroot/features.hpp"
#include "milroot/mask.hpp"
#include "milroot/rng.hpp"
#include "milroot/samples.hpp"
#include "milroot/superpixels.hpp"

namespace milroot {

struct Bag {
  std::string id;
  int label = 0;  // 1 = contains root
  std::vector<Instance> instances;
};

enum class BagMode { kImage, kSmallBag, kInstance };

inline std::string_view to_string(BagMode m) {
  switch (m) {
    case BagMode::kImage: return "image";
    case BagMode::kSmallBag: return "small";
    case BagMode::kInstance: return "instance";
  }
  return "image";
}

inline BagMode parse_bag_mode(std::string_view s) {
  if (s == "image" || s == "image-level") return BagMode::kImage;
  if (s == "small" || s == "small-bag") return BagMode::kSmallBag;
  if (s == "instance" || s == "instance-level") return BagMode::kInstance;
  throw Error("bags", "unknown bag mode '" + std::string(s) + "'");
}

struct BagOptions {
  BagMode mode = BagMode::kImage;
  int group_size = 10;             // small-bag mode
  bool downsample = true;          // image-level mode
  double root_fraction = 0.5;      // superpixel is root if >= this share is in the mask
  int instances_per_class = 1000;  // instance-level mode, per image
  int bags_per_class = 100;        // small-bag mode, per image
  double compactness = 10.0;       // coarse SLIC for small bags

  void validate() const {
    if (mode == BagMode::kSmallBag && group_size < 2) {
      throw Error("bags", "group_size must be >= 2 in small-bag mode");
    }
    if (!(root_fraction > 0.0 && root_fraction <= 1.0)) {
      throw Error("bags", "root_fraction must be in (0, 1]");
    }
  }
};

inline constexpr int kGreenBins = 200;

inline int green_bin(double raw_mean_green) {
  const int b = static_cast<int>(std::floor(raw_mean_green / 255.0 * kGreenBins));
  return std::clamp(b, 0, kGreenBins - 1);
}

/// Keeps one uniformly chosen instance per non-empty bin of a 200-bin
/// histogram of raw mean-G over [0, 255]. Output is ordered by bin.
inline Bag downsample_bag(const Bag& bag, std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> bins(kGreenBins);
  for (std::size_t i = 0; i < bag.instances.size(); ++i) {
    bins[green_bin(bag.instances[i].raw_mean_green)].push_back(i);
  }
  Rng rng(seed);
  Bag out;
  out.id = bag.id;
  out.label = bag.label;
  for (const auto& members : bins) {
    if (members.empty()) continue;
    std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
    out.instances.push_back(bag.instances[members[pick(rng)]]);
  }
  return out;
}

/// Whether each superpixel counts as root: at least `root_fraction` of its
/// pixels lie inside the mask.
inline std::vector<int> superpixel_root_labels(const SuperpixelMap& spmap, const BinaryMask& mask,
                                               double root_fraction) {
  check_same_shape(spmap.height, spmap.width, mask, "bags");
  std::vector<int> out(spmap.count, 0);
  for (int id = 0; id < spmap.count; ++id) {
    std::size_t inside = 0;
    for (const auto& p : spmap.members[id]) inside += mask.at(p.row, p.col) != 0;
    out[id] = static_cast<double>(inside) >=
                      root_fraction * static_cast<double>(spmap.members[id].size())
                  ? 1
                  : 0;
  }
  return out;
}

/// Everything needed to turn one image into bags.
struct BagSource {
  std::string image_id;
  int image_label = 0;
  const std::vector<Instance>* instances = nullptr;  // scaled, indexed by superpixel id
  const SuperpixelMap* spmap = nullptr;
  const BinaryMask* mask = nullptr;  // required for small-bag and instance-level modes
  const LabImage* lab = nullptr;     // required for small-bag mode
};

namespace detail {

// Up to `k` elements of `pool` drawn without replacement, in ascending order.
inline std::vector<std::size_t> sample_sorted(std::vector<std::size_t> pool, std::size_t k,
                                              Rng& rng) {
  if (pool.size() > k) {
    std::shuffle(pool.begin(), pool.end(), rng);
    pool.resize(k);
  }
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace detail

/// Builds the bags of one image at the requested label granularity.
///
/// image-level: one bag labeled with the image label, optionally downsampled.
/// instance-level: singleton bags labeled from the mask, up to
///   instances_per_class root and soil superpixels each.
/// small-bag: a coarse SLIC run groups about group_size superpixels; a group
///   is positive if any member is root; up to bags_per_class of each label.
inline std::vector<Bag> regroup_bags(const BagSource& src, const BagOptions& opt,
                                     std::uint64_t seed) {
  opt.validate();
  if (src.instances == nullptr || src.instances->empty()) {
    throw Error("bags", "image '" + src.image_id + "' has no instances");
  }
  const auto& inst = *src.instances;
  Rng rng(seed);
  std::vector<Bag> bags;

  if (opt.mode == BagMode::kImage) {
    Bag bag{src.image_id, src.image_label, inst};
    if (opt.downsample) bag = downsample_bag(bag, splitmix64(seed));
    bags.push_back(std::move(bag));
    return bags;
  }

  if (src.mask == nullptr) throw Error("bags", "mask required");
  if (src.spmap == nullptr) throw Error("bags", "superpixel map required");
  if (static_cast<std::size_t>(src.spmap->count) != inst.size()) {
    throw Error("bags", "instance count does not match superpixel count");
  }
  const auto root = superpixel_root_labels(*src.spmap, *src.mask, opt.root_fraction);

  if (opt.mode == BagMode::kInstance) {
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < inst.size(); ++i) (root[i] ? pos : neg).push_back(i);
    const auto k = static_cast<std::size_t>(std::max(0, opt.instances_per_class));
    auto chosen_pos = detail::sample_sorted(pos, k, rng);
    auto chosen_neg = detail::sample_sorted(neg, k, rng);
    std::vector<std::size_t> chosen;
    std::merge(chosen_pos.begin(), chosen_pos.end(), chosen_neg.begin(), chosen_neg.end(),
               std::back_inserter(chosen));
    for (std::size_t i : chosen) {
      bags.push_back({src.image_id + "#sp" + std::to_string(i), root[i], {inst[i]}});
    }
    return bags;
  }

  // Small-bag mode.
  if (src.lab == nullptr) throw Error("bags", "LAB image required for small-bag mode");
  const auto& sp = *src.spmap;
  SlicParams coarse;
  coarse.target_count = std::max(1, static_cast<int>(std::lround(
                                        static_cast<double>(sp.count) / opt.group_size)));
  coarse.compactness = opt.compactness;
  const SuperpixelMap groups = slic_segment(*src.lab, coarse);

  std::vector<std::vector<std::size_t>> members(groups.count);
  for (int id = 0; id < sp.count; ++id) {
    std::map<int, std::size_t> votes;
    for (const auto& p : sp.members[id]) ++votes[groups.label(p.row, p.col)];
    int best = -1;
    std::size_t best_votes = 0;
    for (const auto& [g, v] : votes) {
      if (v > best_votes) best = g, best_votes = v;
    }
    members[best].push_back(static_cast<std::size_t>(id));
  }
  std::vector<std::size_t> pos, neg;
  for (std::size_t g = 0; g < members.size(); ++g) {
    if (members[g].empty()) continue;
    const bool any_root =
        std::any_of(members[g].begin(), members[g].end(), [&](std::size_t i) { return root[i]; });
    (any_root ? pos : neg).push_back(g);
  }
  const auto k = static_cast<std::size_t>(std::max(0, opt.bags_per_class));
  auto chosen_pos = detail::sample_sorted(pos, k, rng);
  auto chosen_neg = detail::sample_sorted(neg, k, rng);
  std::vector<std::size_t> chosen;
  std::merge(chosen_pos.begin(), chosen_pos.end(), chosen_neg.begin(), chosen_neg.end(),
             std::back_inserter(chosen));
  for (std::size_t g : chosen) {
    Bag bag;
    bag.id = src.image_id + "#group" + std::to_string(g);
    for (std::size_t i : members[g]) {
      bag.label = bag.label || root[i];
      bag.instances.push_back(inst[i]);
    }
    bags.push_back(std::move(bag));
  }
  return bags;
}

/// Bags flattened into one instance matrix for the MIL trainers.
struct BagSet {
  Samples instances;
  std::vector<int> bag_of;                       // bag index per instance
  std::vector<int> bag_labels;                   // per bag
  std::vector<std::vector<std::size_t>> members;  // instance indices per bag

  std::size_t bag_count() const noexcept { return bag_labels.size(); }

  void add_bag(int label, const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw Error("bags", "bag has no instances");
    if (label != 0 && label != 1) throw Error("bags", "bag label must be 0 or 1");
    const int b = static_cast<int>(bag_labels.size());
    bag_labels.push_back(label);
    members.emplace_back();
    for (const auto& r : rows) {
      members.back().push_back(instances.size());
      instances.push_back(r);
      bag_of.push_back(b);
    }
  }

  // Instance labels equal to their bag label.
  std::vector<int> inherited_labels() const {
    std::vector<int> y(bag_of.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = bag_labels[bag_of[i]];
    return y;
  }

  void require_both_labels(const char* stage) const {
    const bool pos = std::find(bag_labels.begin(), bag_labels.end(), 1) != bag_labels.end();
    const bool neg = std::find(bag_labels.begin(), bag_labels.end(), 0) != bag_labels.end();
    if (!pos || !neg) throw Error(stage, "need at least one positive and one negative bag");
  }
};

inline BagSet flatten_bags(const std::vector<Bag>& bags, const FeatureMask& mask) {
  BagSet set;
  set.instances = Samples(mask.size());
  for (const auto& bag : bags) {
    std::vector<std::vector<double>> rows;
    rows.reserve(bag.instances.size());
    for (const auto& inst : bag.instances) rows.push_back(mask.project(inst.values));
    set.add_bag(bag.label, rows);
  }
  return set;
}

}  // namespace milroot

#endif  // MILROOT_BAGS_HPP_
