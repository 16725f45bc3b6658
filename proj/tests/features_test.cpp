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

#include <cmath>
#include <map>

#include "milroot/features.hpp"
#include "test_util.hpp"

namespace milroot {
namespace {

std::vector<Instance> single_region(const RasterImage& img) {
  const auto sp = SuperpixelMap::from_labels(
      img.height(), img.width(), std::vector<int>(static_cast<std::size_t>(img.height()) * img.width(), 0));
  return extract_features(img, rgb_to_lab(img), sp);
}

// Plain histogram entropy, independent of the extractor's binning helpers.
double entropy_of(const std::vector<int>& bytes) {
  std::map<int, int> counts;
  for (int b : bytes) ++counts[b];
  double h = 0.0;
  for (const auto& [v, c] : counts) {
    const double p = static_cast<double>(c) / bytes.size();
    h -= p * std::log2(p);
  }
  return h;
}

TEST(Features, ConstantRegionHasZeroSpread) {
  const RasterImage img(5, 4, 77.0);
  const auto f = single_region(img);
  ASSERT_EQ(f.size(), 1u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(f[0].values[i], 77.0);
  for (std::size_t i = 6; i < 18; ++i) EXPECT_NEAR(f[0].values[i], 0.0, 1e-9) << kFeatureNames[i];
  EXPECT_DOUBLE_EQ(f[0].raw_mean_green, 77.0);
}

TEST(Features, HalfBlackHalfWhite) {
  RasterImage img(4, 4);
  for (int r = 0; r < 4; ++r) {
    for (int c = 2; c < 4; ++c) {
      for (int b = 0; b < 3; ++b) img.at(r, c, b) = 255.0;
    }
  }
  const auto f = single_region(img)[0];
  EXPECT_DOUBLE_EQ(f.values[kMeanR], 127.5);
  EXPECT_DOUBLE_EQ(f.values[kVarR], 16256.25);
  EXPECT_NEAR(f.values[kEntropyR], 1.0, 1e-12);
  EXPECT_NEAR(f.values[kEntropyL], 1.0, 1e-12);
  EXPECT_NEAR(f.values[kMeanL], 50.0, 1e-3);
}

TEST(Features, AllByteLevelsGiveEightBits) {
  RasterImage img(16, 16);
  for (int i = 0; i < 256; ++i) img.at(i / 16, i % 16, 0) = i;
  const auto f = single_region(img)[0];
  EXPECT_NEAR(f.values[kEntropyR], 8.0, 1e-12);
  EXPECT_NEAR(f.values[kEntropyG], 0.0, 1e-12);
  EXPECT_NEAR(f.values[kVarR], (256.0 * 256.0 - 1.0) / 12.0, 1e-9);
}

TEST(Features, MatchesDirectComputationOnRandomRegions) {
  Rng rng(31);
  const auto img = testing::random_image(12, 10, rng);
  const auto lab = rgb_to_lab(img);
  std::vector<int> labels(120);
  for (int i = 0; i < 120; ++i) labels[i] = (i / 10) / 4;  // three bands of rows
  const auto sp = SuperpixelMap::from_labels(12, 10, labels);
  const auto f = extract_features(img, lab, sp, "x");
  ASSERT_EQ(f.size(), 3u);
  for (int id = 0; id < 3; ++id) {
    EXPECT_EQ(f[id].image, "x");
    EXPECT_EQ(f[id].superpixel, id);
    for (int band = 0; band < 6; ++band) {
      std::vector<double> v;
      std::vector<int> bytes;
      for (int r = 4 * id; r < 4 * id + 4; ++r) {
        for (int c = 0; c < 10; ++c) {
          const double x = band < 3 ? img.at(r, c, band) : lab.at(r, c, band - 3);
          v.push_back(x);
          const double byte = band == 3 ? x * 2.55 : band > 3 ? x + 128.0 : x;
          bytes.push_back(static_cast<int>(std::clamp(std::round(byte), 0.0, 255.0)));
        }
      }
      double mean = 0.0;
      for (double x : v) mean += x / v.size();
      double var = 0.0;
      for (double x : v) var += (x - mean) * (x - mean) / v.size();
      EXPECT_NEAR(f[id].values[band], mean, 1e-9);
      EXPECT_NEAR(f[id].values[6 + band], var, 1e-7);
      EXPECT_NEAR(f[id].values[12 + band], entropy_of(bytes), 1e-12);
    }
  }
}

TEST(Features, ShapeMismatchThrows) {
  const RasterImage img(4, 4);
  const auto sp = SuperpixelMap::from_labels(4, 3, std::vector<int>(12, 0));
  EXPECT_THROW(extract_features(img, rgb_to_lab(img), sp), Error);
}

TEST(Scaling, OrderOfMagnitude) {
  EXPECT_EQ(order_of_magnitude_scale(87.0), 100.0);
  EXPECT_EQ(order_of_magnitude_scale(100.0), 100.0);
  EXPECT_EQ(order_of_magnitude_scale(100.5), 1000.0);
  EXPECT_EQ(order_of_magnitude_scale(-0.5), 1.0);
  EXPECT_EQ(order_of_magnitude_scale(0.05), 0.1);
  EXPECT_EQ(order_of_magnitude_scale(0.0), 1.0);
  EXPECT_EQ(order_of_magnitude_scale(1.0), 1.0);
}

TEST(Scaling, PerImageColumnScale) {
  std::vector<Instance> inst(2);
  inst[0].values[kMeanR] = 87.0;
  inst[1].values[kMeanR] = -20.0;
  inst[0].values[kVarR] = 100.0;
  const auto [scaled, scale] = scale_features(inst);
  EXPECT_EQ(scale.scales[kMeanR], 100.0);
  EXPECT_DOUBLE_EQ(scaled[0].values[kMeanR], 0.87);
  EXPECT_DOUBLE_EQ(scaled[1].values[kMeanR], -0.2);
  EXPECT_EQ(scale.scales[kMeanG], 1.0);
  EXPECT_DOUBLE_EQ(scaled[0].values[kVarR], 1.0);
  for (const auto& i : scaled) {
    for (double v : i.values) EXPECT_LE(std::abs(v), 1.0);
  }
  EXPECT_THROW(scale_features({}), Error);
}

TEST(FeatureMaskTest, Parse) {
  EXPECT_EQ(FeatureMask::parse("all").size(), 18u);
  EXPECT_EQ(FeatureMask::parse("17").size(), 17u);
  const auto nine = FeatureMask::parse("9");
  EXPECT_EQ(nine.size(), 9u);
  EXPECT_EQ(nine.names()[5], "var-G");
  EXPECT_EQ(FeatureMask::parse("mean-R,5").indices(), (std::vector<std::size_t>{0, 5}));
  EXPECT_THROW(FeatureMask::parse("bogus"), Error);
  EXPECT_THROW(FeatureMask::parse(","), Error);
  const auto m17 = FeatureMask::without_mean_b().indices();
  EXPECT_EQ(std::count(m17.begin(), m17.end(), kMeanLabB), 0);
}

TEST(Features, CsvLayout) {
  Instance a;
  a.image = "im";
  a.superpixel = 3;
  a.values[0] = 0.5;
  const auto csv = instances_to_csv({a});
  EXPECT_EQ(csv.substr(0, 24), "image,superpixel,mean-R,");
  EXPECT_NE(csv.find("\nim,3,0.5,0,"), std::string::npos);
}

}  // namespace
}  // namespace milroot
