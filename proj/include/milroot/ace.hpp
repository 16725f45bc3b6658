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

#ifndef MILROOT_ACE_HPP_
#define MILROOT_ACE_HPP_

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "milroot/bags.hpp"
#include "milroot/error.hpp"
#include "milroot/samples.hpp"

namespace milroot {

/// Target signature in a background-whitened space.
struct AceModel {
  Eigen::VectorXd signature;        // unit norm, whitened coordinates
  Eigen::VectorXd background_mean;  // mu_b
  Eigen::MatrixXd whitener;         // W = Sigma_b^(-1/2), eigenvalues floored at eps
  double regularizer = 0.0;         // eps

  std::size_t dims() const noexcept { return static_cast<std::size_t>(background_mean.size()); }
};

/// ACE statistic: cosine between the signature and W (x - mu_b); 0 at x = mu_b.
inline double ace_confidence(const AceModel& model, std::span<const double> x) {
  check_dims(model.dims(), x.size(), "mil");
  const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::VectorXd z = model.whitener * (v - model.background_mean);
  const double norm = z.norm();
  if (norm == 0.0) return 0.0;
  return model.signature.dot(z) / norm;
}

struct AceBackground {
  Eigen::VectorXd mean;
  Eigen::MatrixXd whitener;
  double regularizer = 0.0;
};

/// Mean and symmetric inverse square root of the covariance of `rows`.
/// eps = 1e-6 * trace / d, floored at 1e-12. Eigenvalues below eps are
/// raised to eps before inversion; the rest are used as is, so whitening is
/// exact on well-conditioned data.
inline AceBackground estimate_background(const Eigen::MatrixXd& rows) {
  const Eigen::Index d = rows.cols();
  AceBackground bg;
  bg.mean = rows.colwise().mean().transpose();
  const Eigen::MatrixXd centered = rows.rowwise() - bg.mean.transpose();
  Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(rows.rows());
  bg.regularizer = std::max(1e-6 * cov.trace() / static_cast<double>(d), 1e-12);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd inv_sqrt =
      eig.eigenvalues().array().max(bg.regularizer).sqrt().inverse().matrix();
  bg.whitener = eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
  bg.whitener = (0.5 * (bg.whitener + bg.whitener.transpose())).eval();
  return bg;
}

struct AceTrainResult {
  AceModel model;
  std::vector<double> objective;        // J after initialization and each refinement
  std::vector<std::size_t> selected;    // chosen instance per positive bag (final)
  int iterations = 0;
};

/// MI-ACE. Background statistics come from every negative-bag instance.
///
/// The signature starts at the positive-bag instance maximizing
///   J(s) = mean over positive bags of max_j D(x_j, s) - mean over negatives of D(x, s)
/// and is refined by alternating: pick the most target-like instance per
/// positive bag, then set s to the normalized difference between the mean
/// unit-whitened selection and the mean unit-whitened negative. Stops when
/// the selection repeats or after `max_iters` refinements.
inline AceTrainResult miace_train(const BagSet& bags, int max_iters = 100) {
  bags.require_both_labels("mil");
  const std::size_t n = bags.instances.size();
  const auto d = static_cast<Eigen::Index>(bags.instances.dims());

  std::vector<std::size_t> negatives;
  std::vector<std::size_t> positive_bags;
  for (std::size_t i = 0; i < n; ++i) {
    if (bags.bag_labels[bags.bag_of[i]] == 0) negatives.push_back(i);
  }
  for (std::size_t b = 0; b < bags.bag_count(); ++b) {
    if (bags.bag_labels[b] == 1) positive_bags.push_back(b);
  }

  Eigen::MatrixXd neg_rows(static_cast<Eigen::Index>(negatives.size()), d);
  for (std::size_t k = 0; k < negatives.size(); ++k) {
    const auto r = bags.instances.row(negatives[k]);
    for (Eigen::Index j = 0; j < d; ++j) neg_rows(static_cast<Eigen::Index>(k), j) = r[j];
  }
  const AceBackground bg = estimate_background(neg_rows);

  // Unit-normalized whitened instances (columns); zero vectors stay zero.
  Eigen::MatrixXd unit(d, static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = bags.instances.row(i);
    const Eigen::Map<const Eigen::VectorXd> v(r.data(), d);
    Eigen::VectorXd z = bg.whitener * (v - bg.mean);
    const double norm = z.norm();
    unit.col(static_cast<Eigen::Index>(i)) = norm > 0.0 ? (z / norm).eval() : z;
  }
  Eigen::VectorXd neg_mean = Eigen::VectorXd::Zero(d);
  for (std::size_t i : negatives) neg_mean += unit.col(static_cast<Eigen::Index>(i));
  neg_mean /= static_cast<double>(negatives.size());

  auto select = [&](const Eigen::VectorXd& s, double* objective) {
    std::vector<std::size_t> chosen;
    double total = 0.0;
    for (std::size_t b : positive_bags) {
      std::size_t best = bags.members[b].front();
      double best_score = -std::numeric_limits<double>::infinity();
      for (std::size_t i : bags.members[b]) {
        const double score = s.dot(unit.col(static_cast<Eigen::Index>(i)));
        if (score > best_score) best_score = score, best = i;
      }
      chosen.push_back(best);
      total += best_score;
    }
    if (objective != nullptr) {
      *objective = total / static_cast<double>(positive_bags.size()) - s.dot(neg_mean);
    }
    return chosen;
  };

  // Initialization: exhaustive scan over positive-bag instances.
  Eigen::VectorXd signature;
  double best_j = -std::numeric_limits<double>::infinity();
  for (std::size_t b : positive_bags) {
    for (std::size_t c : bags.members[b]) {
      const Eigen::VectorXd s = unit.col(static_cast<Eigen::Index>(c));
      if (s.squaredNorm() == 0.0) continue;
      double j = 0.0;
      select(s, &j);
      if (j > best_j) best_j = j, signature = s;
    }
  }
  if (signature.size() == 0) {
    // Every positive instance coincides with the background mean.
    signature = Eigen::VectorXd::Unit(d, 0);
    select(signature, &best_j);
  }

  AceTrainResult result;
  result.objective.push_back(best_j);
  std::vector<std::size_t> previous;
  std::vector<std::size_t> chosen = select(signature, nullptr);
  for (int iter = 0; iter < max_iters; ++iter) {
    if (chosen == previous) break;
    Eigen::VectorXd t = Eigen::VectorXd::Zero(d);
    for (std::size_t i : chosen) t += unit.col(static_cast<Eigen::Index>(i));
    t = t / static_cast<double>(chosen.size()) - neg_mean;
    if (t.norm() > 0.0) signature = t / t.norm();
    previous = chosen;
    double j = 0.0;
    chosen = select(signature, &j);
    result.objective.push_back(j);
    ++result.iterations;
  }

  result.selected = chosen;
  result.model.signature = signature;
  result.model.background_mean = bg.mean;
  result.model.whitener = bg.whitener;
  result.model.regularizer = bg.regularizer;
  return result;
}

/// CSV "feature,value", one row per signature entry in feature order.
inline std::string report_signature(const AceModel& model, const std::vector<std::string>& names) {
  if (static_cast<std::size_t>(model.signature.size()) != names.size()) {
    throw Error("mil", "feature name count does not match signature length");
  }
  std::ostringstream os;
  os.precision(17);
  os << "feature,value\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    os << names[i] << ',' << model.signature(static_cast<Eigen::Index>(i)) << '\n';
  }
  return os.str();
}

}  // namespace milroot

#endif  // MILROOT_ACE_HPP_
