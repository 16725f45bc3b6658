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

#ifndef MILROOT_FOREST_HPP_
#define MILROOT_FOREST_HPP_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "milroot/error.hpp"
#include "milroot/rng.hpp"
#include "milroot/samples.hpp"

namespace milroot {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double prob = 0.0;  // P(class 1) at a leaf

  bool is_leaf() const noexcept { return feature < 0; }
  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// Axis-aligned binary tree; x goes left when x[feature] <= threshold.
struct DecisionTree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> x) const {
    int k = 0;
    while (!nodes[k].is_leaf()) {
      k = x[nodes[k].feature] <= nodes[k].threshold ? nodes[k].left : nodes[k].right;
    }
    return nodes[k].prob;
  }

  int depth() const {
    std::vector<std::pair<int, int>> stack{{0, 0}};
    int best = 0;
    while (!stack.empty()) {
      auto [k, d] = stack.back();
      stack.pop_back();
      best = std::max(best, d);
      if (!nodes[k].is_leaf()) {
        stack.push_back({nodes[k].left, d + 1});
        stack.push_back({nodes[k].right, d + 1});
      }
    }
    return best;
  }
};

struct ForestOptions {
  int trees = 100;
  int features_per_node = 4;
  bool bootstrap = true;
  int min_leaf = 1;
  std::uint64_t seed = 0;
};

struct ForestModel {
  std::size_t dims = 0;
  int features_per_node = 0;
  std::vector<DecisionTree> trees;
};

namespace detail {

inline DecisionTree grow_tree(const Samples& x, std::span<const int> y,
                              std::vector<std::size_t> root_samples, int features_per_node,
                              int min_leaf, Rng& rng) {
  DecisionTree tree;
  const std::size_t dims = x.dims();
  std::vector<std::size_t> features(dims);
  std::vector<std::pair<double, int>> column;

  struct Pending {
    int node;
    std::vector<std::size_t> samples;
  };
  tree.nodes.emplace_back();
  std::vector<Pending> stack;
  stack.push_back({0, std::move(root_samples)});

  while (!stack.empty()) {
    Pending job = std::move(stack.back());
    stack.pop_back();
    const auto& s = job.samples;
    const std::size_t n = s.size();
    std::size_t pos = 0;
    for (std::size_t i : s) pos += static_cast<std::size_t>(y[i]);
    const double prob = static_cast<double>(pos) / static_cast<double>(n);

    if (pos == 0 || pos == n || n < 2 * static_cast<std::size_t>(min_leaf)) {
      tree.nodes[job.node].prob = prob;
      continue;
    }

    // Partial Fisher-Yates: the first `features_per_node` entries are the candidates.
    std::iota(features.begin(), features.end(), std::size_t{0});
    const std::size_t m = std::min<std::size_t>(features_per_node, dims);
    for (std::size_t k = 0; k < m; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, dims - 1);
      std::swap(features[k], features[pick(rng)]);
    }

    int best_feature = -1;
    double best_threshold = 0.0;
    double best_impurity = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t f = features[k];
      column.clear();
      for (std::size_t i : s) column.emplace_back(x.row(i)[f], y[i]);
      std::sort(column.begin(), column.end());
      std::size_t left_pos = 0;
      for (std::size_t split = 1; split < n; ++split) {
        left_pos += static_cast<std::size_t>(column[split - 1].second);
        if (column[split - 1].first == column[split].first) continue;
        if (split < static_cast<std::size_t>(min_leaf) ||
            n - split < static_cast<std::size_t>(min_leaf)) {
          continue;
        }
        const double nl = static_cast<double>(split), nr = static_cast<double>(n - split);
        const double pl = static_cast<double>(left_pos);
        const double pr = static_cast<double>(pos - left_pos);
        // Weighted Gini (up to a constant factor of 2).
        const double impurity = pl * (nl - pl) / nl + pr * (nr - pr) / nr;
        if (impurity < best_impurity) {
          best_impurity = impurity;
          best_feature = static_cast<int>(f);
          const double lo = column[split - 1].first, hi = column[split].first;
          double mid = lo + (hi - lo) / 2.0;
          if (!(mid < hi)) mid = lo;
          best_threshold = mid;
        }
      }
    }

    if (best_feature < 0) {
      tree.nodes[job.node].prob = prob;
      continue;
    }

    std::vector<std::size_t> left, right;
    for (std::size_t i : s) {
      (x.row(i)[best_feature] <= best_threshold ? left : right).push_back(i);
    }
    const int li = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    const int ri = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    TreeNode& node = tree.nodes[job.node];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = li;
    node.right = ri;
    node.prob = prob;
    stack.push_back({ri, std::move(right)});
    stack.push_back({li, std::move(left)});
  }
  return tree;
}

}  // namespace detail

/// Random forest of Gini trees. Tree t uses its own seed derived from
/// (seed, t), so the result does not depend on the order trees are grown.
inline ForestModel forest_train(const Samples& x, std::span<const int> labels,
                                const ForestOptions& opt) {
  if (x.empty()) throw Error("learners", "empty training set");
  if (labels.size() != x.size()) throw Error("learners", "label count does not match samples");
  for (int v : labels) {
    if (v != 0 && v != 1) throw Error("learners", "labels must be 0 or 1");
  }
  if (opt.trees < 1) throw Error("learners", "tree count must be >= 1");
  if (opt.features_per_node < 1 || static_cast<std::size_t>(opt.features_per_node) > x.dims()) {
    throw Error("learners", "features_per_node must be in [1, dims]");
  }
  if (opt.min_leaf < 1) throw Error("learners", "min_leaf must be >= 1");

  ForestModel model;
  model.dims = x.dims();
  model.features_per_node = opt.features_per_node;
  model.trees.reserve(opt.trees);
  const std::size_t n = x.size();
  for (int t = 0; t < opt.trees; ++t) {
    Rng rng(derive_seed(opt.seed, static_cast<std::uint64_t>(t)));
    std::vector<std::size_t> samples(n);
    if (opt.bootstrap) {
      std::uniform_int_distribution<std::size_t> pick(0, n - 1);
      for (auto& s : samples) s = pick(rng);
    } else {
      std::iota(samples.begin(), samples.end(), std::size_t{0});
    }
    model.trees.push_back(
        detail::grow_tree(x, labels, std::move(samples), opt.features_per_node, opt.min_leaf, rng));
  }
  return model;
}

/// Mean of per-tree leaf probabilities, in [0, 1].
inline double forest_predict(const ForestModel& model, std::span<const double> x) {
  check_dims(model.dims, x.size(), "learners");
  double s = 0.0;
  for (const auto& tree : model.trees) s += tree.predict(x);
  return s / static_cast<double>(model.trees.size());
}

}  // namespace milroot

#endif  // MILROOT_FOREST_HPP_
