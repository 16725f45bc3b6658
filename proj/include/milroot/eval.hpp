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

#ifndef MILROOT_EVAL_HPP_
#define MILROOT_EVAL_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "milroot/error.hpp"
#include "milroot/mask.hpp"
#include "milroot/postproc.hpp"

namespace milroot {

struct RocPoint {
  double threshold = 0.0;  // pixels with confidence >= threshold are called root
  double fpr = 0.0;
  double tpr = 0.0;
  friend bool operator==(const RocPoint&, const RocPoint&) = default;
};

struct RocCurve {
  std::vector<RocPoint> points;  // thresholds decreasing; starts at (0,0), ends at (1,1)
  double auc = 0.0;
};

inline double trapezoid_auc(const std::vector<RocPoint>& pts) {
  double auc = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    auc += (pts[i].fpr - pts[i - 1].fpr) * (pts[i].tpr + pts[i - 1].tpr) * 0.5;
  }
  return auc;
}

/// Exact ROC over unique confidence values; tied pixels enter together.
inline RocCurve roc_curve(std::span<const double> confidence, std::span<const std::uint8_t> gt) {
  if (confidence.size() != gt.size()) throw Error("eval", "confidence and label counts differ");
  std::vector<std::size_t> order(confidence.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return confidence[a] > confidence[b]; });
  std::size_t pos = 0;
  for (auto v : gt) pos += v != 0;
  const std::size_t neg = gt.size() - pos;
  if (pos == 0 || neg == 0) throw Error("eval", "ground truth has a single class");

  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double v = confidence[order[i]];
    for (; i < order.size() && confidence[order[i]] == v; ++i) {
      (gt[order[i]] != 0 ? tp : fp) += 1;
    }
    curve.points.push_back({v, static_cast<double>(fp) / static_cast<double>(neg),
                            static_cast<double>(tp) / static_cast<double>(pos)});
  }
  curve.auc = trapezoid_auc(curve.points);
  return curve;
}

/// Pixels of every map pooled into one curve.
inline RocCurve roc_curve(const std::vector<ConfidenceMap>& maps,
                          const std::vector<BinaryMask>& gt) {
  if (maps.size() != gt.size()) throw Error("eval", "one mask per confidence map required");
  std::vector<double> conf;
  std::vector<std::uint8_t> labels;
  for (std::size_t m = 0; m < maps.size(); ++m) {
    check_same_shape(maps[m].height, maps[m].width, gt[m], "eval");
    conf.insert(conf.end(), maps[m].values.begin(), maps[m].values.end());
    labels.insert(labels.end(), gt[m].data.begin(), gt[m].data.end());
  }
  return roc_curve(conf, labels);
}

/// TPR at the curve point with the largest FPR not above `fpr` (step rule).
inline double tpr_at_fpr(const RocCurve& curve, double fpr) {
  if (!(fpr >= 0.0 && fpr <= 1.0)) throw Error("eval", "FPR query must lie in [0, 1]");
  double tpr = 0.0;
  for (const auto& p : curve.points) {
    if (p.fpr <= fpr) tpr = std::max(tpr, p.tpr);
  }
  return tpr;
}

/// Vertical average of several curves on a fixed FPR grid. Thresholds are NaN.
inline RocCurve average_curves(const std::vector<RocCurve>& curves, std::size_t grid_points = 201) {
  if (curves.empty()) throw Error("eval", "no curves to average");
  RocCurve out;
  for (std::size_t g = 0; g < grid_points; ++g) {
    const double f = static_cast<double>(g) / static_cast<double>(grid_points - 1);
    double sum = 0.0;
    for (const auto& c : curves) sum += tpr_at_fpr(c, f);
    out.points.push_back({std::numeric_limits<double>::quiet_NaN(), f,
                          sum / static_cast<double>(curves.size())});
  }
  out.auc = trapezoid_auc(out.points);
  return out;
}

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

  double tpr() const { return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn); }
  double fpr() const { return fp + tn == 0 ? 0.0 : static_cast<double>(fp) / (fp + tn); }
  Confusion& operator+=(const Confusion& o) {
    tp += o.tp, fp += o.fp, fn += o.fn, tn += o.tn;
    return *this;
  }
};

inline Confusion confusion(const BinaryMask& pred, const BinaryMask& gt) {
  check_same_shape(pred.height, pred.width, gt, "eval");
  Confusion c;
  for (std::size_t p = 0; p < gt.data.size(); ++p) {
    const bool a = pred.data[p] != 0, b = gt.data[p] != 0;
    (a ? (b ? c.tp : c.fp) : (b ? c.fn : c.tn)) += 1;
  }
  return c;
}

inline double f_score(const Confusion& c) {
  const double p = c.tp + c.fp == 0 ? 0.0 : static_cast<double>(c.tp) / (c.tp + c.fp);
  const double r = c.tp + c.fn == 0 ? 0.0 : static_cast<double>(c.tp) / (c.tp + c.fn);
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

inline double f_score(const BinaryMask& pred, const BinaryMask& gt) {
  return f_score(confusion(pred, gt));
}

inline const std::vector<double>& default_fpr_grid() {
  static const std::vector<double> grid = {0.01, 0.02, 0.03, 0.04, 0.05, 0.06};
  return grid;
}

struct RunAggregate {
  std::string algorithm;
  std::vector<double> fpr_grid;
  std::vector<double> mean;
  std::vector<double> variance;  // unbiased; 0 for a single run
};

inline RunAggregate aggregate_runs(const std::string& algorithm, const std::vector<RocCurve>& runs,
                                   const std::vector<double>& grid = default_fpr_grid()) {
  if (runs.empty()) throw Error("eval", "no runs to aggregate");
  RunAggregate agg{algorithm, grid, {}, {}};
  const double n = static_cast<double>(runs.size());
  for (double f : grid) {
    std::vector<double> v;
    for (const auto& c : runs) v.push_back(tpr_at_fpr(c, f));
    std::sort(v.begin(), v.end());  // order-independent summation
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    agg.mean.push_back(mean);
    agg.variance.push_back(runs.size() > 1 ? ss / (n - 1.0) : 0.0);
  }
  return agg;
}

inline std::string roc_to_csv(const RocCurve& curve) {
  std::ostringstream os;
  os.precision(17);
  os << "threshold,fpr,tpr\n";
  for (const auto& p : curve.points) os << p.threshold << ',' << p.fpr << ',' << p.tpr << '\n';
  return os.str();
}

/// One mean row and one variance row per algorithm; columns are the FPR grid.
inline std::string aggregate_to_csv(const std::vector<RunAggregate>& rows) {
  std::ostringstream os;
  os.precision(10);
  os << "algorithm,statistic";
  if (!rows.empty()) {
    for (double f : rows.front().fpr_grid) os << ",fpr=" << f;
  }
  os << '\n';
  for (const auto& r : rows) {
    os << r.algorithm << ",mean";
    for (double v : r.mean) os << ',' << v;
    os << '\n' << r.algorithm << ",variance";
    for (double v : r.variance) os << ',' << v;
    os << '\n';
  }
  return os.str();
}

}  // namespace milroot

#endif  // MILROOT_EVAL_HPP_
