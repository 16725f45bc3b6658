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

#ifndef MILROOT_PIPELINE_HPP_
#define MILROOT_PIPELINE_HPP_

// End-to-end orchestration: datasets, runs, sweeps. Needs milroot_io.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "milroot/bags.hpp"
#include "milroot/error.hpp"
#include "milroot/eval.hpp"
#include "milroot/features.hpp"
#include "milroot/io.hpp"
#include "milroot/model.hpp"
#include "milroot/postproc.hpp"
#include "milroot/raster.hpp"
#include "milroot/rng.hpp"
#include "milroot/superpixels.hpp"

namespace milroot {

enum class Pooling { kPooled, kPerImage };

struct GridAxis {
  double log2_min = 0.0;
  double log2_max = 0.0;
  double log2_step = 1.0;

  std::vector<double> values() const {
    if (!(log2_step > 0.0) || log2_max < log2_min) throw Error("config", "bad grid axis");
    std::vector<double> out;
    for (double e = log2_min; e <= log2_max + 1e-9; e += log2_step) out.push_back(std::exp2(e));
    return out;
  }
};

struct PipelineConfig {
  std::string train_manifest;
  std::string test_manifest;
  std::string output_dir = "milroot_out";

  bool destripe = true;
  double superpixel_size = 100.0;
  double compactness = 10.0;
  int slic_iters = 10;

  FeatureMask features = FeatureMask::all();
  BagOptions bags;
  std::vector<Algorithm> algorithms = {Algorithm::kMiAce};
  TrainParams params;

  std::vector<double> target_fprs = {0.03};
  FilterOptions filter;
  Pooling pooling = Pooling::kPooled;
  std::vector<double> fpr_grid = default_fpr_grid();

  int runs = 30;
  std::uint64_t seed = 0;
  int workers = 1;
  bool write_maps = true;

  GridAxis gamma_grid{-15.0, 3.0, 4.0};
  GridAxis c_grid{-5.0, 15.0, 4.0};

  void validate() const {
    if (train_manifest.empty()) throw Error("config", "train_manifest is required");
    if (runs < 1) throw Error("config", "runs must be >= 1");
    if (workers < 1) throw Error("config", "workers must be >= 1");
    if (algorithms.empty()) throw Error("config", "no algorithms selected");
    if (fpr_grid.empty() || target_fprs.empty()) throw Error("config", "FPR lists must be non-empty");
    if (!(superpixel_size >= 1.0)) throw Error("config", "superpixel_size must be >= 1");
    bags.validate();
    gamma_grid.values();
    c_grid.values();
  }
};

inline nlohmann::json to_json(const PipelineConfig& c) {
  nlohmann::json algos = nlohmann::json::array();
  for (auto a : c.algorithms) algos.push_back(std::string(to_string(a)));
  return {
      {"train_manifest", c.train_manifest},
      {"test_manifest", c.test_manifest},
      {"output_dir", c.output_dir},
      {"destripe", c.destripe},
      {"superpixel_size", c.superpixel_size},
      {"compactness", c.compactness},
      {"slic_iters", c.slic_iters},
      {"features", c.features.indices()},
      {"bags",
       {{"mode", std::string(to_string(c.bags.mode))},
        {"downsample", c.bags.downsample},
        {"group_size", c.bags.group_size},
        {"root_fraction", c.bags.root_fraction},
        {"instances_per_class", c.bags.instances_per_class},
        {"bags_per_class", c.bags.bags_per_class}}},
      {"algorithms", algos},
      {"params", to_json(c.params)},
      {"postproc",
       {{"target_fprs", c.target_fprs},
        {"min_size", c.filter.min_size},
        {"min_ecc", c.filter.min_ecc},
        {"mode", std::string(to_string(c.filter.mode))}}},
      {"eval",
       {{"pooling", c.pooling == Pooling::kPooled ? "pooled" : "per-image"},
        {"fpr_grid", c.fpr_grid}}},
      {"runs", c.runs},
      {"seed", c.seed},
      {"workers", c.workers},
      {"write_maps", c.write_maps},
      {"sweep",
       {{"gamma_log2", {c.gamma_grid.log2_min, c.gamma_grid.log2_max, c.gamma_grid.log2_step}},
        {"C_log2", {c.c_grid.log2_min, c.c_grid.log2_max, c.c_grid.log2_step}}}},
  };
}

namespace detail {

inline FeatureMask mask_from_json(const nlohmann::json& j) {
  if (j.is_string()) return FeatureMask::parse(j.get<std::string>());
  if (j.is_number_integer()) return FeatureMask::parse(std::to_string(j.get<int>()));
  return FeatureMask(j.get<std::vector<std::size_t>>());
}

inline GridAxis axis_from_json(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 3) throw Error("config", "grid axis needs [log2_min, log2_max, log2_step]");
  return {v[0], v[1], v[2]};
}

}  // namespace detail

/// Missing keys keep their defaults.
inline PipelineConfig config_from_json(const nlohmann::json& j) {
  PipelineConfig c;
  try {
    c.train_manifest = j.value("train_manifest", c.train_manifest);
    c.test_manifest = j.value("test_manifest", c.test_manifest);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.destripe = j.value("destripe", c.destripe);
    c.superpixel_size = j.value("superpixel_size", c.superpixel_size);
    c.compactness = j.value("compactness", c.compactness);
    c.slic_iters = j.value("slic_iters", c.slic_iters);
    if (j.contains("features")) c.features = detail::mask_from_json(j.at("features"));
    if (j.contains("bags")) {
      const auto& b = j.at("bags");
      if (b.contains("mode")) c.bags.mode = parse_bag_mode(b.at("mode").get<std::string>());
      c.bags.downsample = b.value("downsample", c.bags.downsample);
      c.bags.group_size = b.value("group_size", c.bags.group_size);
      c.bags.root_fraction = b.value("root_fraction", c.bags.root_fraction);
      c.bags.instances_per_class = b.value("instances_per_class", c.bags.instances_per_class);
      c.bags.bags_per_class = b.value("bags_per_class", c.bags.bags_per_class);
    }
    c.bags.compactness = c.compactness;
    if (j.contains("algorithms")) {
      c.algorithms.clear();
      const auto& a = j.at("algorithms");
      if (a.is_string()) {
        c.algorithms.push_back(parse_algorithm(a.get<std::string>()));
      } else {
        for (const auto& s : a) c.algorithms.push_back(parse_algorithm(s.get<std::string>()));
      }
    }
    if (j.contains("params")) c.params = train_params_from_json(j.at("params"), c.params);
    if (j.contains("postproc")) {
      const auto& p = j.at("postproc");
      c.target_fprs = p.value("target_fprs", c.target_fprs);
      c.filter.min_size = p.value("min_size", c.filter.min_size);
      c.filter.min_ecc = p.value("min_ecc", c.filter.min_ecc);
      if (p.contains("mode")) c.filter.mode = parse_filter_mode(p.at("mode").get<std::string>());
    }
    if (j.contains("eval")) {
      const auto& e = j.at("eval");
      if (e.contains("pooling")) {
        const auto s = e.at("pooling").get<std::string>();
        if (s == "pooled") {
          c.pooling = Pooling::kPooled;
        } else if (s == "per-image") {
          c.pooling = Pooling::kPerImage;
        } else {
          throw Error("config", "pooling must be 'pooled' or 'per-image'");
        }
      }
      c.fpr_grid = e.value("fpr_grid", c.fpr_grid);
    }
    c.runs = j.value("runs", c.runs);
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
    c.write_maps = j.value("write_maps", c.write_maps);
    if (j.contains("sweep")) {
      const auto& s = j.at("sweep");
      if (s.contains("gamma_log2")) c.gamma_grid = detail::axis_from_json(s.at("gamma_log2"));
      if (s.contains("C_log2")) c.c_grid = detail::axis_from_json(s.at("C_log2"));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("config", e.what());
  }
  return c;
}

/// Sets a dotted key ("bags.mode", "params.C") from a string. The value is
/// parsed as JSON when possible, otherwise taken as a string.
inline void set_config_key(nlohmann::json& j, const std::string& dotted, const std::string& value) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(value);
  } catch (const nlohmann::json::exception&) {
    parsed = value;
  }
  nlohmann::json* node = &j;
  std::stringstream ss(dotted);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  if (parts.empty()) throw Error("config", "empty key");
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (!node->contains(parts[i]) || !(*node)[parts[i]].is_object()) {
      (*node)[parts[i]] = nlohmann::json::object();
    }
    node = &(*node)[parts[i]];
  }
  (*node)[parts.back()] = parsed;
}

inline int worker_count(int configured) {
  int n = std::max(1, configured);
  if (const char* env = std::getenv("MILROOT_WORKERS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

// ---------------------------------------------------------------------------
// Dataset preparation.

struct PreparedImage {
  std::string id;
  std::string path;
  int label = 0;
  RasterImage image;  // destriped when configured
  LabImage lab;
  SuperpixelMap spmap;
  std::vector<Instance> instances;  // scaled per image
  FeatureScale scale;
  std::optional<BinaryMask> mask;

  // Ground truth for evaluation: a negative image without a mask has no root.
  BinaryMask truth() const {
    if (mask) return *mask;
    if (label == 0) return BinaryMask(image.height(), image.width());
    throw Error("eval", "positive image '" + id + "' has no mask");
  }
};

namespace detail {

template <class F>
auto in_stage(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(stage, e.what());
  }
}

}  // namespace detail

inline PreparedImage prepare_image(const RasterImage& raw, const std::string& id, int label,
                                   std::optional<BinaryMask> mask, const PipelineConfig& cfg) {
  PreparedImage p;
  p.id = id;
  p.label = label;
  detail::in_stage("preprocess", [&] {
    raw.validate();
    p.image = cfg.destripe ? destripe(raw) : raw;
    p.lab = rgb_to_lab(p.image);
  });
  detail::in_stage("superpixels", [&] {
    SlicParams sp = default_slic_params(raw.height(), raw.width(), cfg.superpixel_size);
    sp.compactness = cfg.compactness;
    sp.max_iters = cfg.slic_iters;
    p.spmap = slic_segment(p.lab, sp);
  });
  detail::in_stage("features", [&] {
    auto [inst, scale] = scale_features(extract_features(p.image, p.lab, p.spmap, id));
    p.instances = std::move(inst);
    p.scale = scale;
  });
  if (mask) check_same_shape(raw.height(), raw.width(), *mask, "preprocess");
  p.mask = std::move(mask);
  return p;
}

inline std::vector<PreparedImage> load_dataset(const std::string& manifest,
                                               const PipelineConfig& cfg) {
  const auto entries = detail::in_stage("io", [&] { return read_manifest(manifest); });
  std::vector<PreparedImage> out(entries.size());
  std::vector<std::exception_ptr> errors(entries.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < entries.size();) {
      try {
        const auto& e = entries[i];
        std::optional<BinaryMask> mask;
        if (e.mask) mask = read_mask(*e.mask);
        out[i] = prepare_image(read_image(e.image), fs::path(e.image).stem().string(), e.label,
                               std::move(mask), cfg);
        out[i].path = e.image;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::min<int>(worker_count(cfg.workers), static_cast<int>(entries.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

/// Bags of every training image, redrawn from `seed`.
inline BagSet build_bags(const std::vector<PreparedImage>& images, const PipelineConfig& cfg,
                         std::uint64_t seed) {
  return detail::in_stage("bags", [&] {
    std::vector<Bag> bags;
    for (std::size_t i = 0; i < images.size(); ++i) {
      const auto& im = images[i];
      BagSource src{im.id, im.label, &im.instances, &im.spmap,
                    im.mask ? &*im.mask : nullptr, &im.lab};
      auto b = regroup_bags(src, cfg.bags, derive_seed(seed, i));
      bags.insert(bags.end(), std::make_move_iterator(b.begin()), std::make_move_iterator(b.end()));
    }
    BagSet set = flatten_bags(bags, cfg.features);
    set.require_both_labels("bags");
    return set;
  });
}

inline std::vector<double> superpixel_confidence(const TrainedModel& model,
                                                 const PreparedImage& im) {
  std::vector<double> out(im.instances.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = model.confidence(im.instances[i].values);
  return out;
}

inline ConfidenceMap predict_map(const TrainedModel& model, const PreparedImage& im) {
  return detail::in_stage("predict",
                          [&] { return broadcast_confidence(im.spmap, superpixel_confidence(model, im)); });
}

// ---------------------------------------------------------------------------
// Runs.

struct FilterStats {
  std::string filter;  // none, size, eccentricity, combined
  double tpr = 0.0;
  double fpr = 0.0;
};

struct PostprocResult {
  double target_fpr = 0.0;
  double threshold = 0.0;
  std::vector<FilterStats> stats;
};

struct AlgorithmRun {
  Algorithm algorithm = Algorithm::kMiAce;
  RocCurve roc;
  std::vector<PostprocResult> postproc;
  TrainedModel model;
};

struct RunResult {
  int run = 0;
  std::vector<AlgorithmRun> algorithms;
};

struct ExperimentResult {
  std::vector<RunResult> runs;
  std::vector<RunAggregate> aggregates;
  std::string aggregate_csv;
};

inline RocCurve evaluate_maps(const std::vector<ConfidenceMap>& maps,
                              const std::vector<BinaryMask>& truth, Pooling pooling) {
  return detail::in_stage("eval", [&] {
    if (pooling == Pooling::kPooled) return roc_curve(maps, truth);
    std::vector<RocCurve> curves;
    for (std::size_t i = 0; i < maps.size(); ++i) {
      const auto pos = truth[i].count();
      if (pos == 0 || pos == truth[i].data.size()) continue;
      curves.push_back(roc_curve(std::vector<ConfidenceMap>{maps[i]}, {truth[i]}));
    }
    return average_curves(curves);
  });
}

/// Thresholds at each target FPR, then applies the size, eccentricity and
/// combined filters, reporting pooled pixel rates for each.
inline std::vector<PostprocResult> postprocess_maps(const std::vector<ConfidenceMap>& maps,
                                                    const std::vector<BinaryMask>& truth,
                                                    const PipelineConfig& cfg) {
  return detail::in_stage("postproc", [&] {
    std::vector<PostprocResult> out;
    const std::vector<std::pair<std::string, FilterOptions>> filters = {
        {"none", {0.0, 0.0, FilterMode::kEither}},
        {"size", {cfg.filter.min_size, 0.0, FilterMode::kEither}},
        {"eccentricity", {0.0, cfg.filter.min_ecc, FilterMode::kEither}},
        {"combined", cfg.filter},
    };
    for (double target : cfg.target_fprs) {
      PostprocResult r;
      r.target_fpr = target;
      r.threshold = select_threshold_for_fpr(maps, truth, target);
      std::vector<BinaryMask> binary;
      for (const auto& m : maps) binary.push_back(binarize(m, r.threshold));
      for (const auto& [name, opt] : filters) {
        Confusion total;
        for (std::size_t i = 0; i < maps.size(); ++i) {
          total += confusion(name == "none" ? binary[i] : filter_components(binary[i], opt), truth[i]);
        }
        r.stats.push_back({name, total.tpr(), total.fpr()});
      }
      out.push_back(std::move(r));
    }
    return out;
  });
}

namespace detail {

inline std::string run_dir_name(int run) {
  std::ostringstream os;
  os << "run_" << std::setw(3) << std::setfill('0') << run;
  return os.str();
}

inline void touch(const fs::path& p) { write_text(p.string(), ""); }

inline std::string postproc_csv(const std::vector<PostprocResult>& rows) {
  std::ostringstream os;
  os.precision(10);
  os << "target_fpr,threshold,filter,tpr,fpr\n";
  for (const auto& r : rows) {
    for (const auto& s : r.stats) {
      os << r.target_fpr << ',' << r.threshold << ',' << s.filter << ',' << s.tpr << ',' << s.fpr
         << '\n';
    }
  }
  return os.str();
}

}  // namespace detail

/// One repetition: redraw bags, train every configured algorithm, predict the
/// test images, evaluate and post-process. Writes into `dir` when non-empty.
inline RunResult run_once(const std::vector<PreparedImage>& train,
                          const std::vector<PreparedImage>& test, const PipelineConfig& cfg,
                          int run, const fs::path& dir) {
  RunResult result;
  result.run = run;
  const BagSet bags = build_bags(train, cfg, derive_seed(cfg.seed, run, "bags"));
  std::vector<BinaryMask> truth;
  for (const auto& im : test) truth.push_back(detail::in_stage("eval", [&] { return im.truth(); }));

  for (Algorithm algo : cfg.algorithms) {
    const std::string name(to_string(algo));
    AlgorithmRun ar;
    ar.algorithm = algo;
    ar.model = detail::in_stage("train", [&] {
      return train_model(algo, bags, cfg.features, cfg.params,
                         derive_seed(cfg.seed, run, "train-" + name))
          .model;
    });
    std::vector<ConfidenceMap> maps;
    for (const auto& im : test) maps.push_back(predict_map(ar.model, im));
    ar.roc = evaluate_maps(maps, truth, cfg.pooling);
    ar.postproc = postprocess_maps(maps, truth, cfg);

    if (!dir.empty()) {
      detail::in_stage("io", [&] {
        const fs::path adir = dir / name;
        fs::create_directories(adir);
        save_model(ar.model, (adir / "model.json").string());
        write_text((adir / "roc.csv").string(), roc_to_csv(ar.roc));
        write_text((adir / "postproc.csv").string(), detail::postproc_csv(ar.postproc));
        if (algo == Algorithm::kMiAce) {
          write_text((adir / "signature.csv").string(),
                     report_signature(std::get<AceModel>(ar.model.payload), cfg.features.names()));
        }
        if (cfg.write_maps) {
          fs::create_directories(adir / "maps");
          for (std::size_t i = 0; i < test.size(); ++i) {
            write_cmap((adir / "maps" / (test[i].id + ".cmap")).string(), maps[i]);
          }
        }
      });
    }
    result.algorithms.push_back(std::move(ar));
  }
  return result;
}

/// Mean post-processing rates across runs, per algorithm, target and filter.
inline std::string postproc_summary_csv(const std::vector<RunResult>& runs) {
  std::ostringstream os;
  os.precision(10);
  os << "algorithm,target_fpr,filter,mean_tpr,mean_fpr\n";
  if (runs.empty()) return os.str();
  const auto& first = runs.front().algorithms;
  for (std::size_t a = 0; a < first.size(); ++a) {
    for (std::size_t t = 0; t < first[a].postproc.size(); ++t) {
      for (std::size_t f = 0; f < first[a].postproc[t].stats.size(); ++f) {
        double tpr = 0.0, fpr = 0.0;
        for (const auto& r : runs) {
          tpr += r.algorithms[a].postproc[t].stats[f].tpr;
          fpr += r.algorithms[a].postproc[t].stats[f].fpr;
        }
        const double n = static_cast<double>(runs.size());
        os << to_string(first[a].algorithm) << ',' << first[a].postproc[t].target_fpr << ','
           << first[a].postproc[t].stats[f].filter << ',' << tpr / n << ',' << fpr / n << '\n';
      }
    }
  }
  return os.str();
}

/// Runs `cfg.runs` repetitions over prepared data. Output goes under
/// cfg.output_dir unless `write` is false. A ".partial" marker stays behind
/// if anything fails.
inline ExperimentResult run_experiment(const std::vector<PreparedImage>& train,
                                       const std::vector<PreparedImage>& test,
                                       const PipelineConfig& cfg, bool write = true) {
  cfg.validate();
  if (test.empty()) throw Error("config", "no test images");
  const fs::path out = write ? fs::path(cfg.output_dir) : fs::path();
  if (write) {
    detail::in_stage("io", [&] {
      fs::create_directories(out);
      detail::touch(out / ".partial");
      write_text((out / "config.json").string(), to_json(cfg).dump(2) + "\n");
    });
  }

  ExperimentResult result;
  result.runs.resize(cfg.runs);
  std::vector<std::exception_ptr> errors(cfg.runs);
  std::atomic<int> next{0};
  auto work = [&] {
    for (int r; (r = next++) < cfg.runs;) {
      try {
        fs::path dir;
        if (write) {
          dir = out / detail::run_dir_name(r);
          fs::create_directories(dir);
          detail::touch(dir / ".partial");
        }
        result.runs[r] = run_once(train, test, cfg, r, dir);
        if (write) fs::remove(dir / ".partial");
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const int n = std::min(worker_count(cfg.workers), cfg.runs);
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  detail::in_stage("eval", [&] {
    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
      std::vector<RocCurve> curves;
      for (const auto& r : result.runs) curves.push_back(r.algorithms[a].roc);
      result.aggregates.push_back(
          aggregate_runs(std::string(to_string(cfg.algorithms[a])), curves, cfg.fpr_grid));
    }
    result.aggregate_csv = aggregate_to_csv(result.aggregates);
  });
  if (write) {
    detail::in_stage("io", [&] {
      write_text((out / "aggregate.csv").string(), result.aggregate_csv);
      write_text((out / "postproc_summary.csv").string(), postproc_summary_csv(result.runs));
      fs::remove(out / ".partial");
    });
  }
  return result;
}

inline ExperimentResult run_experiment(const PipelineConfig& cfg) {
  cfg.validate();
  const auto train = load_dataset(cfg.train_manifest, cfg);
  const auto test = load_dataset(cfg.test_manifest.empty() ? cfg.train_manifest : cfg.test_manifest, cfg);
  return run_experiment(train, test, cfg, true);
}

// ---------------------------------------------------------------------------
// Hyperparameter sweep over (gamma, C) for the SVM-based learners.

struct SweepCell {
  double gamma = 0.0;
  double C = 0.0;
  double f_score = 0.0;
  bool best = false;
};

struct SweepResult {
  std::vector<SweepCell> cells;
  std::string csv;
};

/// F-score of the sign of the decision value on the test images, per grid cell.
/// The first cell with the highest score is flagged.
inline SweepResult run_sweep(const std::vector<PreparedImage>& train,
                             const std::vector<PreparedImage>& test, const PipelineConfig& cfg) {
  cfg.validate();
  const Algorithm algo = cfg.algorithms.front();
  if (algo != Algorithm::kMiSvm && algo != Algorithm::kSvm) {
    throw Error("config", "sweep needs an SVM-based algorithm (misvm or svm)");
  }
  const BagSet bags = build_bags(train, cfg, derive_seed(cfg.seed, 0, "bags"));
  std::vector<BinaryMask> truth;
  for (const auto& im : test) truth.push_back(detail::in_stage("eval", [&] { return im.truth(); }));

  SweepResult result;
  for (double gamma : cfg.gamma_grid.values()) {
    for (double C : cfg.c_grid.values()) {
      TrainParams p = cfg.params;
      p.gamma = gamma;
      p.C = C;
      const auto model = detail::in_stage("train", [&] {
        return train_model(algo, bags, cfg.features, p,
                           derive_seed(cfg.seed, 0, "train-" + std::string(to_string(algo))))
            .model;
      });
      Confusion total;
      for (std::size_t i = 0; i < test.size(); ++i) {
        total += confusion(binarize(predict_map(model, test[i]), 0.0), truth[i]);
      }
      result.cells.push_back({gamma, C, f_score(total), false});
    }
  }
  auto best = std::max_element(result.cells.begin(), result.cells.end(),
                               [](const SweepCell& a, const SweepCell& b) { return a.f_score < b.f_score; });
  best->best = true;

  std::ostringstream os;
  os.precision(10);
  os << "gamma,C,f_score,best\n";
  for (const auto& c : result.cells) {
    os << c.gamma << ',' << c.C << ',' << c.f_score << ',' << (c.best ? 1 : 0) << '\n';
  }
  result.csv = os.str();
  return result;
}

}  // namespace milroot

#endif  // MILROOT_PIPELINE_HPP_
