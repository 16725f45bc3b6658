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

#ifndef MILROOT_SVM_HPP_
#define MILROOT_SVM_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <list>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "milroot/error.hpp"
#include "milroot/rng.hpp"
#include "milroot/samples.hpp"

namespace milroot {

struct Kernel {
  enum class Type { kLinear, kRbf };
  Type type = Type::kRbf;
  double gamma = 1.0;

  static Kernel linear() { return {Type::kLinear, 0.0}; }
  static Kernel rbf(double gamma) { return {Type::kRbf, gamma}; }

  double operator()(std::span<const double> a, std::span<const double> b) const noexcept {
    if (type == Type::kLinear) {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
      return s;
    }
    double d2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      d2 += d * d;
    }
    return std::exp(-gamma * d2);
  }

  friend bool operator==(const Kernel&, const Kernel&) = default;
};

/// Trained binary SVM. coef[i] holds alpha_i * y_i for support vector i.
struct SvmModel {
  Kernel kernel;
  double C = 1.0;
  Samples support_vectors;
  std::vector<double> coef;
  double bias = 0.0;

  std::size_t dims() const noexcept { return support_vectors.dims(); }
};

/// f(x) = sum_i coef_i k(sv_i, x) + bias, unthresholded.
inline double svm_decision(const SvmModel& model, std::span<const double> x) {
  check_dims(model.dims(), x.size(), "learners");
  double f = model.bias;
  for (std::size_t i = 0; i < model.coef.size(); ++i) {
    f += model.coef[i] * model.kernel(model.support_vectors.row(i), x);
  }
  return f;
}

struct SmoOptions {
  double C = 10.0;
  Kernel kernel = Kernel::rbf(1.0);
  double tol = 1e-3;
  std::int64_t max_updates = 1'000'000;
  std::uint64_t seed = 0;
  std::size_t cache_bytes = std::size_t{512} << 20;
  bool record_objective = false;
};

struct SmoResult {
  SvmModel model;
  std::vector<double> alpha;           // per training sample
  std::vector<double> train_decision;  // f(x_i) per training sample
  double dual_objective = 0.0;         // sum(alpha) - 1/2 alpha' Q alpha
  std::int64_t updates = 0;
  std::vector<double> objective_trace;  // filled when record_objective is set
};

/// Lazily computed kernel rows with LRU eviction under a byte budget.
class KernelCache {
 public:
  KernelCache(const Samples& x, Kernel kernel, std::size_t budget_bytes)
      : x_(x), kernel_(kernel), rows_(x.size()), where_(x.size(), lru_.end()) {
    const std::size_t row_bytes = std::max<std::size_t>(1, x.size() * sizeof(double));
    capacity_ = std::max<std::size_t>(2, budget_bytes / row_bytes);
    diag_.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) diag_[i] = kernel_(x_.row(i), x_.row(i));
  }

  double diag(std::size_t i) const noexcept { return diag_[i]; }

  const std::vector<double>& row(std::size_t i) {
    if (!rows_[i].empty()) {
      lru_.splice(lru_.begin(), lru_, where_[i]);
      return rows_[i];
    }
    if (lru_.size() >= capacity_) {
      const std::size_t victim = lru_.back();
      lru_.pop_back();
      std::vector<double>().swap(rows_[victim]);
      where_[victim] = lru_.end();
    }
    auto& r = rows_[i];
    r.resize(x_.size());
    const auto xi = x_.row(i);
    for (std::size_t j = 0; j < x_.size(); ++j) r[j] = kernel_(xi, x_.row(j));
    lru_.push_front(i);
    where_[i] = lru_.begin();
    return r;
  }

  const Samples& samples() const noexcept { return x_; }
  const Kernel& kernel() const noexcept { return kernel_; }

 private:
  const Samples& x_;
  Kernel kernel_;
  std::vector<std::vector<double>> rows_;
  std::list<std::size_t> lru_;
  std::vector<std::list<std::size_t>::iterator> where_;
  std::vector<double> diag_;
  std::size_t capacity_ = 2;
};

namespace detail {

inline void check_binary_labels(std::span<const int> y, std::size_t n) {
  if (y.size() != n) throw Error("learners", "label count does not match sample count");
  bool pos = false, neg = false;
  for (int v : y) {
    if (v == 1) pos = true;
    else if (v == 0) neg = true;
    else throw Error("learners", "labels must be 0 or 1");
  }
  if (!pos || !neg) throw Error("learners", "training data must contain both classes");
}

}  // namespace detail

/// SMO on the C-SVM dual with maximal-violating-pair selection. Stops when
/// the KKT gap falls below `tol`. Labels are 0/1. The scan order used to
/// break ties between equally violating samples is a seeded permutation.
inline SmoResult smo_train(KernelCache& cache, std::span<const int> labels,
                           const SmoOptions& opt) {
  const Samples& x = cache.samples();
  const std::size_t n = x.size();
  detail::check_binary_labels(labels, n);
  if (!(opt.C > 0.0)) throw Error("learners", "C must be > 0");
  if (opt.kernel.type == Kernel::Type::kRbf && !(opt.kernel.gamma > 0.0)) {
    throw Error("learners", "RBF gamma must be > 0");
  }

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = labels[i] == 1 ? 1.0 : -1.0;
  const double c = opt.C;
  std::vector<double> alpha(n, 0.0), grad(n, -1.0);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(opt.seed);
  std::shuffle(order.begin(), order.end(), rng);

  auto objective = [&] {
    double d = 0.0;
    for (std::size_t t = 0; t < n; ++t) d += alpha[t] * (1.0 - grad[t]) * 0.5;
    return d;
  };

  SmoResult result;
  if (opt.record_objective) result.objective_trace.push_back(0.0);
  std::int64_t updates = 0;
  for (; updates < opt.max_updates; ++updates) {
    std::size_t i = n, j = n;
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    for (std::size_t t : order) {
      const bool up = (y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0);
      const bool low = (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < c);
      const double v = -y[t] * grad[t];
      if (up && v > gmax) gmax = v, i = t;
      if (low && v < gmin) gmin = v, j = t;
    }
    if (i == n || j == n || gmax - gmin < opt.tol) break;

    const auto& qi = cache.row(i);
    const auto& qj = cache.row(j);
    const double kij = qi[j];
    const double old_ai = alpha[i], old_aj = alpha[j];
    double quad = cache.diag(i) + cache.diag(j) - 2.0 * kij;
    if (quad <= 0.0) quad = 1e-12;
    if (y[i] != y[j]) {
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) alpha[j] = 0, alpha[i] = diff;
      } else if (alpha[i] < 0) {
        alpha[i] = 0, alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > c) alpha[i] = c, alpha[j] = c - diff;
      } else if (alpha[j] > c) {
        alpha[j] = c, alpha[i] = c + diff;
      }
    } else {
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) alpha[i] = c, alpha[j] = sum - c;
      } else if (alpha[j] < 0) {
        alpha[j] = 0, alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) alpha[j] = c, alpha[i] = sum - c;
      } else if (alpha[i] < 0) {
        alpha[i] = 0, alpha[j] = sum;
      }
    }

    const double dai = (alpha[i] - old_ai) * y[i];
    const double daj = (alpha[j] - old_aj) * y[j];
    for (std::size_t t = 0; t < n; ++t) grad[t] += y[t] * (qi[t] * dai + qj[t] * daj);
    if (opt.record_objective) result.objective_trace.push_back(objective());
  }

  // Threshold: average over free vectors, else midpoint of the feasible range.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (alpha[t] >= c) {
      if (y[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (alpha[t] <= 0) {
      if (y[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;

  SvmModel& model = result.model;
  model.kernel = cache.kernel();
  model.C = c;
  model.bias = -rho;
  model.support_vectors = Samples(x.dims());
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0) {
      model.support_vectors.push_back(x.row(t));
      model.coef.push_back(alpha[t] * y[t]);
    }
  }
  result.train_decision.resize(n);
  for (std::size_t t = 0; t < n; ++t) result.train_decision[t] = y[t] * (grad[t] + 1.0) - rho;
  result.dual_objective = objective();
  result.alpha = std::move(alpha);
  result.updates = updates;
  return result;
}

inline SmoResult smo_train(const Samples& x, std::span<const int> labels, const SmoOptions& opt) {
  KernelCache cache(x, opt.kernel, opt.cache_bytes);
  return smo_train(cache, labels, opt);
}

}  // namespace milroot

#endif  // MILROOT_SVM_HPP_
