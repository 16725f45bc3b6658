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

#ifndef MILROOT_MIFORESTS_HPP_
#define MILROOT_MIFORESTS_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "milroot/bags.hpp"
#include "milroot/forest.hpp"
#include "milroot/rng.hpp"

namespace milroot {

struct AnnealingSchedule {
  double initial_temperature = 1.0;
  double cooling = 0.5;
  int steps = 10;
  int retrains_per_step = 1;
};

struct MiForestsOptions {
  ForestOptions forest;
  AnnealingSchedule schedule;
};

struct MiForestsResult {
  ForestModel model;
  std::vector<int> labels;  // final hard instance labels
  std::vector<double> temperatures;
};

/// Temperature-sharpened probability p^(1/T) / (p^(1/T) + (1-p)^(1/T)).
inline double sharpen_probability(double p, double temperature) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  const double logit = (std::log(p) - std::log1p(-p)) / temperature;
  if (logit > 700.0) return 1.0;
  if (logit < -700.0) return 0.0;
  return 1.0 / (1.0 + std::exp(-logit));
}

namespace detail {

// Guarantees one positive per positive bag by forcing the highest-probability
// instance (lowest index on ties).
inline void enforce_positive_bags(const BagSet& bags, const std::vector<double>& prob,
                                  std::vector<int>& labels) {
  for (std::size_t b = 0; b < bags.bag_count(); ++b) {
    if (bags.bag_labels[b] != 1) continue;
    bool any = false;
    std::size_t best = bags.members[b].front();
    for (std::size_t i : bags.members[b]) {
      any = any || labels[i] == 1;
      if (prob[i] > prob[best]) best = i;
    }
    if (!any) labels[best] = 1;
  }
}

inline std::vector<double> forest_predict_all(const ForestModel& model, const Samples& x) {
  std::vector<double> p(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) p[i] = forest_predict(model, x.row(i));
  return p;
}

}  // namespace detail

/// MIForests by deterministic annealing over latent instance labels.
///
/// Labels start at the bag labels. Each step trains a forest, redraws every
/// positive-bag label from the forest probability sharpened at temperature T,
/// restores the one-positive-per-bag constraint and cools T. A final forest
/// is trained on the argmax labels.
inline MiForestsResult miforests_train(const BagSet& bags, const MiForestsOptions& opt) {
  bags.require_both_labels("mil");
  if (opt.schedule.steps < 0 || opt.schedule.retrains_per_step < 1 ||
      !(opt.schedule.initial_temperature > 0.0) || !(opt.schedule.cooling > 0.0)) {
    throw Error("mil", "invalid annealing schedule");
  }
  std::vector<int> labels = bags.inherited_labels();
  Rng rng(derive_seed(opt.forest.seed, 0, "miforests-draw"));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  MiForestsResult result;
  double temperature = opt.schedule.initial_temperature;
  std::uint64_t fit_index = 0;

  auto fit = [&](const std::vector<int>& y) {
    ForestOptions fo = opt.forest;
    fo.seed = derive_seed(opt.forest.seed, fit_index++);
    return forest_train(bags.instances, y, fo);
  };

  std::vector<double> prob;
  for (int step = 0; step < opt.schedule.steps; ++step) {
    for (int r = 0; r < opt.schedule.retrains_per_step; ++r) {
      prob = detail::forest_predict_all(fit(labels), bags.instances);
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (bags.bag_labels[bags.bag_of[i]] != 1) continue;
        labels[i] = unif(rng) < sharpen_probability(prob[i], temperature) ? 1 : 0;
      }
      detail::enforce_positive_bags(bags, prob, labels);
    }
    result.temperatures.push_back(temperature);
    temperature *= opt.schedule.cooling;
  }

  // Hard assignment from the last annealed forest, then the final retrain.
  if (prob.empty()) prob = detail::forest_predict_all(fit(labels), bags.instances);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (bags.bag_labels[bags.bag_of[i]] == 1) labels[i] = prob[i] > 0.5 ? 1 : 0;
  }
  detail::enforce_positive_bags(bags, prob, labels);
  result.model = fit(labels);
  result.labels = std::move(labels);
  return result;
}

}  // namespace milroot

#endif  // MILROOT_MIFORESTS_HPP_
