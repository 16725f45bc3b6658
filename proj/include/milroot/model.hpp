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

#ifndef MILROOT_MODEL_HPP_
#define MILROOT_MODEL_HPP_

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "json.hpp"

#include "milroot/ace.hpp"
#include "milroot/bags.hpp"
#include "milroot/error.hpp"
#include "milroot/features.hpp"
#include "milroot/forest.hpp"
#include "milroot/miforests.hpp"
#include "milroot/misvm.hpp"
#include "milroot/raster.hpp"
#include "milroot/svm.hpp"

namespace milroot {

enum class Algorithm { kMiAce, kMiSvm, kMiForests, kSvm, kRf };

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kMiAce: return "miace";
    case Algorithm::kMiSvm: return "misvm";
    case Algorithm::kMiForests: return "miforests";
    case Algorithm::kSvm: return "svm";
    case Algorithm::kRf: return "rf";
  }
  return "miace";
}

inline Algorithm parse_algorithm(std::string_view s) {
  if (s == "miace" || s == "mi-ace") return Algorithm::kMiAce;
  if (s == "misvm" || s == "mi-svm") return Algorithm::kMiSvm;
  if (s == "miforests" || s == "miforest") return Algorithm::kMiForests;
  if (s == "svm") return Algorithm::kSvm;
  if (s == "rf" || s == "forest") return Algorithm::kRf;
  throw Error("train", "unknown algorithm '" + std::string(s) + "'");
}

struct TrainParams {
  double C = 10.0;
  double gamma = 1.0;
  bool linear_kernel = false;
  double svm_tol = 1e-3;
  int trees = 100;
  int features_per_node = 4;
  AnnealingSchedule schedule;
  int misvm_max_iters = 50;
  int ace_max_iters = 100;

  SmoOptions smo(std::uint64_t seed) const {
    SmoOptions o;
    o.C = C;
    o.kernel = linear_kernel ? Kernel::linear() : Kernel::rbf(gamma);
    o.tol = svm_tol;
    o.seed = seed;
    return o;
  }
  ForestOptions forest(std::uint64_t seed) const {
    ForestOptions o;
    o.trees = trees;
    o.features_per_node = features_per_node;
    o.seed = seed;
    return o;
  }
};

inline nlohmann::json to_json(const TrainParams& p) {
  return {{"C", p.C},
          {"gamma", p.gamma},
          {"kernel", p.linear_kernel ? "linear" : "rbf"},
          {"svm_tol", p.svm_tol},
          {"trees", p.trees},
          {"features_per_node", p.features_per_node},
          {"annealing",
           {{"t0", p.schedule.initial_temperature},
            {"cooling", p.schedule.cooling},
            {"steps", p.schedule.steps},
            {"retrains_per_step", p.schedule.retrains_per_step}}},
          {"misvm_max_iters", p.misvm_max_iters},
          {"ace_max_iters", p.ace_max_iters}};
}

inline TrainParams train_params_from_json(const nlohmann::json& j, TrainParams p = {}) {
  p.C = j.value("C", p.C);
  p.gamma = j.value("gamma", p.gamma);
  if (j.contains("kernel")) p.linear_kernel = j.at("kernel").get<std::string>() == "linear";
  p.svm_tol = j.value("svm_tol", p.svm_tol);
  p.trees = j.value("trees", p.trees);
  p.features_per_node = j.value("features_per_node", p.features_per_node);
  if (j.contains("annealing")) {
    const auto& a = j.at("annealing");
    p.schedule.initial_temperature = a.value("t0", p.schedule.initial_temperature);
    p.schedule.cooling = a.value("cooling", p.schedule.cooling);
    p.schedule.steps = a.value("steps", p.schedule.steps);
    p.schedule.retrains_per_step = a.value("retrains_per_step", p.schedule.retrains_per_step);
  }
  p.misvm_max_iters = j.value("misvm_max_iters", p.misvm_max_iters);
  p.ace_max_iters = j.value("ace_max_iters", p.ace_max_iters);
  return p;
}

/// A trained detector of any of the five algorithms plus the feature mask
/// it was trained on.
struct TrainedModel {
  Algorithm algorithm = Algorithm::kMiAce;
  std::variant<AceModel, SvmModel, ForestModel> payload;
  FeatureMask mask;
  std::string scale_policy = "per-image";
  std::uint64_t seed = 0;
  TrainParams params;

  // Confidence on an already-projected vector.
  double score(std::span<const double> x) const {
    return std::visit(
        [&](const auto& m) -> double {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, AceModel>) {
            return ace_confidence(m, x);
          } else if constexpr (std::is_same_v<M, SvmModel>) {
            return svm_decision(m, x);
          } else {
            return forest_predict(m, x);
          }
        },
        payload);
  }

  double confidence(const FeatureVector& v) const { return score(mask.project(v)); }
};

/// Instance labels a trainer settled on (empty for MI-ACE and the baselines).
struct TrainOutcome {
  TrainedModel model;
  std::vector<int> instance_labels;
};

inline TrainOutcome train_model(Algorithm algo, const BagSet& bags, const FeatureMask& mask,
                                const TrainParams& params, std::uint64_t seed) {
  TrainOutcome out;
  out.model.algorithm = algo;
  out.model.mask = mask;
  out.model.seed = seed;
  out.model.params = params;
  if (bags.instances.dims() != mask.size()) {
    throw Error("train", "bag dimensionality does not match the feature mask");
  }
  switch (algo) {
    case Algorithm::kMiAce: {
      auto r = miace_train(bags, params.ace_max_iters);
      out.model.payload = std::move(r.model);
      break;
    }
    case Algorithm::kMiSvm: {
      MisvmOptions o;
      o.smo = params.smo(seed);
      o.max_iters = params.misvm_max_iters;
      auto r = misvm_train(bags, o);
      out.model.payload = std::move(r.model);
      out.instance_labels = std::move(r.labels);
      break;
    }
    case Algorithm::kMiForests: {
      MiForestsOptions o;
      o.forest = params.forest(seed);
      o.schedule = params.schedule;
      auto r = miforests_train(bags, o);
      out.model.payload = std::move(r.model);
      out.instance_labels = std::move(r.labels);
      break;
    }
    case Algorithm::kSvm: {
      bags.require_both_labels("train");
      const auto y = bags.inherited_labels();
      out.model.payload = smo_train(bags.instances, y, params.smo(seed)).model;
      break;
    }
    case Algorithm::kRf: {
      const auto y = bags.inherited_labels();
      out.model.payload = forest_train(bags.instances, y, params.forest(seed));
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON persistence. Doubles are written in shortest round-trip form, so a
// loaded model reproduces predictions bit-exactly.

namespace detail {

inline nlohmann::json vec_json(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline Eigen::VectorXd json_vec(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline nlohmann::json payload_json(const AceModel& m) {
  nlohmann::json w = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.whitener.rows(); ++r) {
    w.push_back(vec_json(m.whitener.row(r).transpose()));
  }
  return {{"signature", vec_json(m.signature)},
          {"background_mean", vec_json(m.background_mean)},
          {"whitener", w},
          {"regularizer", m.regularizer}};
}

inline nlohmann::json payload_json(const SvmModel& m) {
  nlohmann::json sv = nlohmann::json::array();
  for (std::size_t i = 0; i < m.support_vectors.size(); ++i) {
    const auto r = m.support_vectors.row(i);
    sv.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return {{"kernel",
           {{"type", m.kernel.type == Kernel::Type::kLinear ? "linear" : "rbf"},
            {"gamma", m.kernel.gamma}}},
          {"C", m.C},
          {"bias", m.bias},
          {"dims", m.support_vectors.dims()},
          {"coef", m.coef},
          {"support_vectors", sv}};
}

inline nlohmann::json payload_json(const ForestModel& m) {
  nlohmann::json trees = nlohmann::json::array();
  for (const auto& t : m.trees) {
    std::vector<int> feature, left, right;
    std::vector<double> threshold, prob;
    for (const auto& n : t.nodes) {
      feature.push_back(n.feature);
      threshold.push_back(n.threshold);
      left.push_back(n.left);
      right.push_back(n.right);
      prob.push_back(n.prob);
    }
    trees.push_back({{"feature", feature},
                     {"threshold", threshold},
                     {"left", left},
                     {"right", right},
                     {"prob", prob}});
  }
  return {{"dims", m.dims}, {"features_per_node", m.features_per_node}, {"trees", trees}};
}

}  // namespace detail

inline nlohmann::json model_to_json(const TrainedModel& model) {
  nlohmann::json j;
  j["format"] = "milroot-model";
  j["version"] = 1;
  j["algorithm"] = std::string(to_string(model.algorithm));
  j["seed"] = model.seed;
  j["feature_mask"] = model.mask.indices();
  j["feature_names"] = model.mask.names();
  j["scale_policy"] = model.scale_policy;
  j["lab_convention"] = kLabConvention;
  j["params"] = to_json(model.params);
  j["payload"] = std::visit([](const auto& m) { return detail::payload_json(m); }, model.payload);
  return j;
}

inline TrainedModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", "") != "milroot-model") throw Error("model", "not a milroot model");
    TrainedModel model;
    model.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    model.seed = j.at("seed").get<std::uint64_t>();
    model.mask = FeatureMask(j.at("feature_mask").get<std::vector<std::size_t>>());
    model.scale_policy = j.value("scale_policy", "per-image");
    model.params = train_params_from_json(j.at("params"));
    const auto& p = j.at("payload");
    switch (model.algorithm) {
      case Algorithm::kMiAce: {
        AceModel m;
        m.signature = detail::json_vec(p.at("signature"));
        m.background_mean = detail::json_vec(p.at("background_mean"));
        const auto& w = p.at("whitener");
        const auto d = static_cast<Eigen::Index>(w.size());
        m.whitener.resize(d, d);
        for (Eigen::Index r = 0; r < d; ++r) m.whitener.row(r) = detail::json_vec(w[r]).transpose();
        m.regularizer = p.at("regularizer").get<double>();
        model.payload = std::move(m);
        break;
      }
      case Algorithm::kMiSvm:
      case Algorithm::kSvm: {
        SvmModel m;
        const auto& k = p.at("kernel");
        m.kernel = k.at("type").get<std::string>() == "linear"
                       ? Kernel::linear()
                       : Kernel::rbf(k.at("gamma").get<double>());
        m.C = p.at("C").get<double>();
        m.bias = p.at("bias").get<double>();
        m.coef = p.at("coef").get<std::vector<double>>();
        m.support_vectors = Samples(p.at("dims").get<std::size_t>());
        for (const auto& row : p.at("support_vectors")) {
          m.support_vectors.push_back(row.get<std::vector<double>>());
        }
        model.payload = std::move(m);
        break;
      }
      case Algorithm::kMiForests:
      case Algorithm::kRf: {
        ForestModel m;
        m.dims = p.at("dims").get<std::size_t>();
        m.features_per_node = p.at("features_per_node").get<int>();
        for (const auto& t : p.at("trees")) {
          const auto feature = t.at("feature").get<std::vector<int>>();
          const auto threshold = t.at("threshold").get<std::vector<double>>();
          const auto left = t.at("left").get<std::vector<int>>();
          const auto right = t.at("right").get<std::vector<int>>();
          const auto prob = t.at("prob").get<std::vector<double>>();
          DecisionTree tree;
          for (std::size_t i = 0; i < feature.size(); ++i) {
            tree.nodes.push_back({feature[i], threshold[i], left[i], right[i], prob[i]});
          }
          m.trees.push_back(std::move(tree));
        }
        model.payload = std::move(m);
        break;
      }
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error("model", std::string("malformed model file: ") + e.what());
  }
}

inline void save_model(const TrainedModel& model, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("model", "cannot write " + path);
  os << model_to_json(model).dump() << '\n';
}

inline TrainedModel load_model(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("model", "cannot read " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("model", std::string("malformed model file: ") + e.what());
  }
  return model_from_json(j);
}

}  // namespace milroot

#endif  // MILROOT_MODEL_HPP_
