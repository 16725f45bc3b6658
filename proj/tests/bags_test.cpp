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

#include <gtest/gtest.h>

#include <set>

#include "milroot/pipeline.hpp"
#include "milroot/synthgen.hpp"

namespace milroot {
namespace {

std::vector<Instance> with_green(const std::vector<double>& greens) {
  std::vector<Instance> out(greens.size());
  for (std::size_t i = 0; i < greens.size(); ++i) {
    out[i].raw_mean_green = greens[i];
    out[i].values[kMeanG] = greens[i] / 1000.0;
    out[i].superpixel = static_cast<int>(i);
  }
  return out;
}

TEST(Downsample, OnePerOccupiedBin) {
  // 120 distinct bins, several instances each.
  std::vector<double> g;
  for (int b = 0; b < 120; ++b) {
    for (int k = 0; k < 3; ++k) g.push_back((b + 0.1 + 0.3 * k) * 255.0 / kGreenBins);
  }
  const Bag bag{"im", 1, with_green(g)};
  const Bag out = downsample_bag(bag, 7);
  ASSERT_EQ(out.instances.size(), 120u);
  std::set<int> bins;
  for (const auto& inst : out.instances) bins.insert(green_bin(inst.raw_mean_green));
  EXPECT_EQ(bins.size(), 120u);
  EXPECT_EQ(out.label, 1);
  EXPECT_EQ(out.id, "im");
}

TEST(Downsample, SingleValueCollapses) {
  const Bag bag{"im", 0, with_green(std::vector<double>(50, 93.0))};
  EXPECT_EQ(downsample_bag(bag, 1).instances.size(), 1u);
}

TEST(Downsample, EdgesClampAndSeedMatters) {
  EXPECT_EQ(green_bin(-3.0), 0);
  EXPECT_EQ(green_bin(255.0), kGreenBins - 1);
  EXPECT_EQ(green_bin(1.2), 0);
  EXPECT_EQ(green_bin(1.3), 1);
  std::vector<double> g(200, 10.0);
  for (int i = 0; i < 200; ++i) g[i] += i * 1e-6;
  const Bag bag{"im", 0, with_green(g)};
  std::set<int> picks;
  for (std::uint64_t s = 0; s < 20; ++s) picks.insert(downsample_bag(bag, s).instances[0].superpixel);
  EXPECT_GT(picks.size(), 1u);
  EXPECT_EQ(downsample_bag(bag, 5).instances[0].superpixel,
            downsample_bag(bag, 5).instances[0].superpixel);
}

// 4x4 image split into four 2x2 superpixels; the mask covers the top-left
// one fully and one pixel of the top-right one.
struct Grid {
  SuperpixelMap sp = SuperpixelMap::from_labels(4, 4, {0, 0, 1, 1, 0, 0, 1, 1, 2, 2, 3, 3, 2, 2, 3, 3});
  BinaryMask mask{4, 4};
  std::vector<Instance> inst = with_green({10, 20, 30, 40});
  Grid() {
    mask.at(0, 0) = mask.at(0, 1) = mask.at(1, 0) = mask.at(1, 1) = 1;
    mask.at(0, 2) = 1;
  }
  BagSource source(int label) const { return {"g", label, &inst, &sp, &mask, nullptr}; }
};

TEST(RootLabels, FractionRule) {
  const Grid g;
  EXPECT_EQ(superpixel_root_labels(g.sp, g.mask, 0.5), (std::vector<int>{1, 0, 0, 0}));
  EXPECT_EQ(superpixel_root_labels(g.sp, g.mask, 0.25), (std::vector<int>{1, 1, 0, 0}));
}

TEST(Regroup, ImageModeKeepsImageLabel) {
  const Grid g;
  BagOptions opt;
  opt.downsample = false;
  const auto bags = regroup_bags(g.source(1), opt, 3);
  ASSERT_EQ(bags.size(), 1u);
  EXPECT_EQ(bags[0].label, 1);
  EXPECT_EQ(bags[0].instances.size(), 4u);
}

TEST(Regroup, InstanceModeUsesMask) {
  const Grid g;
  BagOptions opt;
  opt.mode = BagMode::kInstance;
  const auto bags = regroup_bags(g.source(1), opt, 3);
  ASSERT_EQ(bags.size(), 4u);
  EXPECT_EQ(bags[0].label, 1);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(bags[i].label, 0);
  for (const auto& b : bags) EXPECT_EQ(b.instances.size(), 1u);

  opt.instances_per_class = 2;
  const auto capped = regroup_bags(g.source(1), opt, 3);
  EXPECT_EQ(capped.size(), 3u);
}

TEST(Regroup, InstanceModeOnNegativeImage) {
  Grid g;
  g.mask = BinaryMask(4, 4);
  BagOptions opt;
  opt.mode = BagMode::kInstance;
  for (const auto& b : regroup_bags(g.source(0), opt, 1)) EXPECT_EQ(b.label, 0);
}

TEST(Regroup, MaskRequired) {
  Grid g;
  BagOptions opt;
  opt.mode = BagMode::kInstance;
  BagSource src = g.source(1);
  src.mask = nullptr;
  try {
    regroup_bags(src, opt, 0);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "bags: mask required");
  }
  opt.mode = BagMode::kSmallBag;
  EXPECT_THROW(regroup_bags(src, opt, 0), Error);
}

TEST(Regroup, SmallBagsArePositiveWhenAnyMemberIsRoot) {
  SynthParams sp;
  sp.seed = 12;
  const auto s = generate_image(sp);
  PipelineConfig cfg;
  const auto im = prepare_image(s.image, "s", 1, s.mask, cfg);
  BagOptions opt;
  opt.mode = BagMode::kSmallBag;
  opt.group_size = 10;
  const auto roots = superpixel_root_labels(im.spmap, *im.mask, opt.root_fraction);
  const BagSource src{"s", 1, &im.instances, &im.spmap, &*im.mask, &im.lab};
  const auto bags = regroup_bags(src, opt, 4);
  std::size_t pos = 0;
  for (const auto& b : bags) {
    bool any = false;
    for (const auto& inst : b.instances) any = any || roots[inst.superpixel];
    EXPECT_EQ(b.label, any ? 1 : 0);
    pos += b.label;
  }
  EXPECT_GT(pos, 0u);
  EXPECT_LT(pos, bags.size());
}

TEST(BagSetTest, Flatten) {
  std::vector<Bag> bags = {{"a", 1, with_green({1, 2})}, {"b", 0, with_green({3})}};
  const auto set = flatten_bags(bags, FeatureMask({kMeanG}));
  EXPECT_EQ(set.bag_count(), 2u);
  EXPECT_EQ(set.instances.size(), 3u);
  EXPECT_EQ(set.instances.dims(), 1u);
  EXPECT_EQ(set.bag_of, (std::vector<int>{0, 0, 1}));
  EXPECT_EQ(set.inherited_labels(), (std::vector<int>{1, 1, 0}));
  EXPECT_DOUBLE_EQ(set.instances.row(2)[0], 0.003);
  BagSet only_pos;
  only_pos.add_bag(1, {{1.0}});
  EXPECT_THROW(only_pos.require_both_labels("learners"), Error);
  EXPECT_THROW(only_pos.add_bag(2, {{1.0}}), Error);
  EXPECT_THROW(only_pos.add_bag(0, {}), Error);
}

TEST(BuildBags, ImageModeGivesOneBagPerImage) {
  PipelineConfig cfg;
  std::vector<PreparedImage> images;
  for (int i = 0; i < 6; ++i) {
    SynthParams sp;
    sp.height = sp.width = 48;
    sp.n_roots = i % 2;
    sp.length_min = 20;
    sp.length_max = 30;
    sp.seed = 70 + i;
    const auto s = generate_image(sp);
    images.push_back(prepare_image(s.image, "i" + std::to_string(i), s.label, s.mask, cfg));
  }
  const auto set = build_bags(images, cfg, 9);
  EXPECT_EQ(set.bag_count(), 6u);
  EXPECT_EQ(std::count(set.bag_labels.begin(), set.bag_labels.end(), 1), 3);
  const auto again = build_bags(images, cfg, 9);
  EXPECT_EQ(set.instances, again.instances);
}

}  // namespace
}  // namespace milroot
