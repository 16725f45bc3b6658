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

// milroot command-line front end.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "milroot/eval.hpp"
#include "milroot/io.hpp"
#include "milroot/pipeline.hpp"
#include "milroot/synthgen.hpp"

namespace fs = std::filesystem;
using namespace milroot;

namespace {

// Options shared by every command that reads a pipeline config.
struct ConfigArgs {
  std::string path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<int> workers;
  std::string out;
  std::string train;
  std::string test;
  std::vector<std::string> algos;

  void add_to(CLI::App* cmd) {
    cmd->add_option("-c,--config", path, "JSON config file")->check(CLI::ExistingFile);
    cmd->add_option("--set", sets, "Override a config key, e.g. --set bags.mode=instance");
    cmd->add_option("--seed", seed, "Base seed");
    cmd->add_option("--runs", runs, "Number of repetitions");
    cmd->add_option("--workers", workers, "Parallel runs (capped by MILROOT_WORKERS)");
    cmd->add_option("-o,--out", out, "Output directory");
    cmd->add_option("--train", train, "Training manifest");
    cmd->add_option("--test", test, "Test manifest");
    cmd->add_option("-a,--algo", algos, "miace, misvm, miforests, svm or rf");
  }

  PipelineConfig load() const {
    nlohmann::json j = nlohmann::json::object();
    if (!path.empty()) {
      try {
        j = nlohmann::json::parse(read_text(path));
      } catch (const nlohmann::json::exception& e) {
        throw Error("config", std::string("malformed config: ") + e.what());
      }
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw Error("config", "--set expects key=value, got '" + s + "'");
      set_config_key(j, s.substr(0, eq), s.substr(eq + 1));
    }
    if (seed) j["seed"] = *seed;
    if (runs) j["runs"] = *runs;
    if (workers) j["workers"] = *workers;
    if (!out.empty()) j["output_dir"] = out;
    if (!train.empty()) j["train_manifest"] = train;
    if (!test.empty()) j["test_manifest"] = test;
    if (!algos.empty()) j["algorithms"] = algos;
    return config_from_json(j);
  }
};

std::string stem(const std::string& path) { return fs::path(path).stem().string(); }

std::vector<PreparedImage> load_test(const PipelineConfig& cfg) {
  return load_dataset(cfg.test_manifest.empty() ? cfg.train_manifest : cfg.test_manifest, cfg);
}

// Confidence maps in `dir` named after the manifest images, with their masks.
struct MapSet {
  std::vector<std::string> ids;
  std::vector<ConfidenceMap> maps;
  std::vector<BinaryMask> truth;
};

MapSet load_maps(const std::string& manifest, const std::string& dir) {
  MapSet s;
  for (const auto& e : read_manifest(manifest)) {
    s.ids.push_back(stem(e.image));
    s.maps.push_back(read_cmap((fs::path(dir) / (s.ids.back() + ".cmap")).string()));
    if (e.mask) {
      s.truth.push_back(read_mask(*e.mask));
    } else if (e.label == 0) {
      s.truth.emplace_back(s.maps.back().height, s.maps.back().width);
    } else {
      throw Error("eval", "positive image '" + s.ids.back() + "' has no mask");
    }
  }
  return s;
}

int cmd_synth(const std::string& out, int positives, int negatives, const SynthParams& base) {
  fs::create_directories(fs::path(out) / "images");
  fs::create_directories(fs::path(out) / "masks");
  std::vector<ManifestEntry> entries;
  for (int i = 0; i < positives + negatives; ++i) {
    SynthParams p = base;
    p.seed = derive_seed(base.seed, static_cast<std::uint64_t>(i));
    if (i >= positives) p.n_roots = 0;
    const auto img = generate_image(p);
    std::ostringstream name;
    name << (img.label ? "pos_" : "neg_") << std::setw(4) << std::setfill('0') << i;
    const std::string image = "images/" + name.str() + ".png";
    const std::string mask = "masks/" + name.str() + ".png";
    write_image((fs::path(out) / image).string(), img.image);
    write_mask((fs::path(out) / mask).string(), img.mask);
    entries.push_back({image, img.label, mask});
  }
  write_manifest((fs::path(out) / "manifest.json").string(), entries);
  std::cout << "wrote " << entries.size() << " images to " << out << "\n";
  return 0;
}

int cmd_preprocess(const std::string& image, const PipelineConfig& cfg) {
  const auto raw = read_image(image);
  const auto p = prepare_image(raw, stem(image), 0, std::nullopt, cfg);
  const fs::path out(cfg.output_dir);
  fs::create_directories(out);
  const std::string id = p.id;
  write_image((out / (id + "_destriped.png")).string(), p.image);
  write_label_png((out / (id + "_superpixels.png")).string(), p.spmap);
  write_boundary_overlay((out / (id + "_overlay.png")).string(), p.image, p.spmap);
  write_text((out / (id + "_features.csv")).string(), instances_to_csv(p.instances));
  std::cout << id << ": " << p.spmap.count << " superpixels\n";
  return 0;
}

int cmd_train(const PipelineConfig& cfg, const std::string& model_path) {
  cfg.validate();
  const auto train = load_dataset(cfg.train_manifest, cfg);
  const BagSet bags = build_bags(train, cfg, derive_seed(cfg.seed, 0, "bags"));
  const Algorithm algo = cfg.algorithms.front();
  const auto model = detail::in_stage("train", [&] {
    return train_model(algo, bags, cfg.features, cfg.params,
                       derive_seed(cfg.seed, 0, "train-" + std::string(to_string(algo))))
        .model;
  });
  const fs::path path = model_path.empty() ? fs::path(cfg.output_dir) / "model.json" : fs::path(model_path);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_model(model, path.string());
  std::cout << to_string(algo) << ": " << bags.bag_count() << " bags, "
            << bags.instances.size() << " instances -> " << path.string() << "\n";
  return 0;
}

int cmd_predict(const PipelineConfig& cfg, const std::string& model_path, bool png) {
  const auto model = load_model(model_path);
  if (model.mask.indices() != cfg.features.indices()) {
    std::cerr << "note: using the model's feature mask\n";
  }
  const auto test = load_test(cfg);
  const fs::path out(cfg.output_dir);
  fs::create_directories(out);
  for (const auto& im : test) {
    const auto map = predict_map(model, im);
    write_cmap((out / (im.id + ".cmap")).string(), map);
    if (png) write_confidence_png((out / (im.id + ".png")).string(), map);
  }
  std::cout << "wrote " << test.size() << " confidence maps to " << out.string() << "\n";
  return 0;
}

int cmd_postproc(const PipelineConfig& cfg, const std::string& manifest, const std::string& maps_dir,
                 std::optional<double> threshold) {
  const auto set = load_maps(manifest, maps_dir);
  const fs::path out(cfg.output_dir);
  fs::create_directories(out);
  std::ostringstream csv;
  csv.precision(10);
  csv << "target_fpr,threshold,filter,tpr,fpr\n";
  std::vector<std::pair<double, double>> cuts;  // (target fpr or NaN, threshold)
  if (threshold) {
    cuts.emplace_back(std::nan(""), *threshold);
  } else {
    for (double f : cfg.target_fprs) cuts.emplace_back(f, select_threshold_for_fpr(set.maps, set.truth, f));
  }
  for (const auto& [target, theta] : cuts) {
    Confusion before, after;
    for (std::size_t i = 0; i < set.maps.size(); ++i) {
      const auto binary = binarize(set.maps[i], theta);
      const auto filtered = filter_components(binary, cfg.filter);
      std::ostringstream tag;
      if (!std::isnan(target)) tag << "_fpr" << target;
      write_mask((out / (set.ids[i] + tag.str() + "_binary.png")).string(), binary);
      write_mask((out / (set.ids[i] + tag.str() + "_filtered.png")).string(), filtered);
      before += confusion(binary, set.truth[i]);
      after += confusion(filtered, set.truth[i]);
    }
    csv << target << ',' << theta << ",none," << before.tpr() << ',' << before.fpr() << '\n';
    csv << target << ',' << theta << ',' << to_string(cfg.filter.mode) << ',' << after.tpr() << ','
        << after.fpr() << '\n';
  }
  write_text((out / "postproc.csv").string(), csv.str());
  std::cout << csv.str();
  return 0;
}

int cmd_eval(const PipelineConfig& cfg, const std::string& manifest, const std::string& maps_dir) {
  const auto set = load_maps(manifest, maps_dir);
  const auto roc = evaluate_maps(set.maps, set.truth, cfg.pooling);
  const fs::path out(cfg.output_dir);
  fs::create_directories(out);
  write_text((out / "roc.csv").string(), roc_to_csv(roc));
  std::printf("auc %.6f\n", roc.auc);
  for (double f : cfg.fpr_grid) std::printf("tpr@fpr=%g %.6f\n", f, tpr_at_fpr(roc, f));
  return 0;
}

int cmd_sweep(const PipelineConfig& cfg) {
  const auto train = load_dataset(cfg.train_manifest, cfg);
  const auto test = load_test(cfg);
  const auto result = run_sweep(train, test, cfg);
  fs::create_directories(cfg.output_dir);
  write_text((fs::path(cfg.output_dir) / "sweep.csv").string(), result.csv);
  std::cout << result.csv;
  return 0;
}

int cmd_experiment(const PipelineConfig& cfg) {
  const auto result = run_experiment(cfg);
  std::cout << result.aggregate_csv;
  return 0;
}

int cmd_signature(const std::string& model_path) {
  const auto model = load_model(model_path);
  const auto* ace = std::get_if<AceModel>(&model.payload);
  if (!ace) throw Error("mil", "signature needs an MI-ACE model");
  std::cout << report_signature(*ace, model.mask.names());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Root segmentation from image-level labels with multiple-instance learning"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic image set with masks and a manifest");
  std::string synth_out = "synth";
  int positives = 20, negatives = 20;
  SynthParams sp;
  synth->add_option("-o,--out", synth_out, "Output directory")->capture_default_str();
  synth->add_option("--positives", positives, "Images with roots")->capture_default_str();
  synth->add_option("--negatives", negatives, "Images without roots")->capture_default_str();
  synth->add_option("--seed", sp.seed, "Base seed")->capture_default_str();
  synth->add_option("--height", sp.height)->capture_default_str();
  synth->add_option("--width", sp.width)->capture_default_str();
  synth->add_option("--roots", sp.n_roots, "Roots per positive image")->capture_default_str();
  synth->add_option("--root-width-min", sp.width_min)->capture_default_str();
  synth->add_option("--root-width-max", sp.width_max)->capture_default_str();
  synth->add_option("--length-min", sp.length_min)->capture_default_str();
  synth->add_option("--length-max", sp.length_max)->capture_default_str();
  synth->add_option("--curvature", sp.curvature)->capture_default_str();
  synth->add_option("--offset", sp.brightness_offset, "Root brightness over soil")->capture_default_str();
  synth->add_option("--texture-scale", sp.texture_scale)->capture_default_str();
  synth->add_option("--texture-amplitude", sp.texture_amplitude)->capture_default_str();
  synth->add_option("--stripes", sp.stripe_amplitude, "Column stripe std")->capture_default_str();
  synth->add_option("--noise", sp.noise_sigma, "Pixel noise std")->capture_default_str();
  synth->add_option("--soil-jitter", sp.soil_jitter)->capture_default_str();
  synth->add_option("--spots", sp.dark_spots)->capture_default_str();

  // preprocess
  auto* pre = app.add_subcommand("preprocess", "Destripe, superpixelize and extract features of one image");
  ConfigArgs pre_cfg;
  std::string pre_image;
  pre->add_option("image", pre_image, "Input image")->required()->check(CLI::ExistingFile);
  pre_cfg.add_to(pre);

  auto* train = app.add_subcommand("train", "Train one model on the training manifest");
  ConfigArgs train_cfg;
  std::string train_model_path;
  train_cfg.add_to(train);
  train->add_option("-m,--model", train_model_path, "Model file (default <out>/model.json)");

  auto* predict = app.add_subcommand("predict", "Write confidence maps for the test manifest");
  ConfigArgs predict_cfg;
  std::string predict_model;
  bool predict_png = false;
  predict_cfg.add_to(predict);
  predict->add_option("-m,--model", predict_model, "Model file")->required()->check(CLI::ExistingFile);
  predict->add_flag("--png", predict_png, "Also write gray PNG renderings");

  auto* post = app.add_subcommand("postproc", "Threshold and filter confidence maps");
  ConfigArgs post_cfg;
  std::string post_manifest, post_maps;
  std::optional<double> post_threshold;
  std::optional<double> min_size, min_ecc;
  std::string filter_mode;
  std::vector<double> post_fprs;
  post_cfg.add_to(post);
  post->add_option("--manifest", post_manifest, "Manifest of the mapped images")->required();
  post->add_option("--maps", post_maps, "Directory of <image>.cmap files")->required();
  post->add_option("--threshold", post_threshold, "Fixed threshold instead of target FPRs");
  post->add_option("--fpr", post_fprs, "Target FPRs");
  post->add_option("--min-size", min_size);
  post->add_option("--min-ecc", min_ecc);
  post->add_option("--mode", filter_mode, "either (default) or both");

  auto* eval = app.add_subcommand("eval", "ROC of confidence maps against masks");
  ConfigArgs eval_cfg;
  std::string eval_manifest, eval_maps;
  eval_cfg.add_to(eval);
  eval->add_option("--manifest", eval_manifest, "Manifest of the mapped images")->required();
  eval->add_option("--maps", eval_maps, "Directory of <image>.cmap files")->required();

  auto* sweep = app.add_subcommand("sweep", "F-score over the (gamma, C) grid for misvm or svm");
  ConfigArgs sweep_cfg;
  sweep_cfg.add_to(sweep);

  auto* experiment = app.add_subcommand("experiment", "Repeated train/predict/evaluate runs");
  ConfigArgs exp_cfg;
  exp_cfg.add_to(experiment);

  auto* signature = app.add_subcommand("signature", "Print the target signature of an MI-ACE model");
  std::string sig_model;
  signature->add_option("model", sig_model, "Model file")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) return cmd_synth(synth_out, positives, negatives, sp);
    if (*pre) return cmd_preprocess(pre_image, pre_cfg.load());
    if (*train) return cmd_train(train_cfg.load(), train_model_path);
    if (*predict) return cmd_predict(predict_cfg.load(), predict_model, predict_png);
    if (*post) {
      auto cfg = post_cfg.load();
      if (min_size) cfg.filter.min_size = *min_size;
      if (min_ecc) cfg.filter.min_ecc = *min_ecc;
      if (!filter_mode.empty()) cfg.filter.mode = parse_filter_mode(filter_mode);
      if (!post_fprs.empty()) cfg.target_fprs = post_fprs;
      return cmd_postproc(cfg, post_manifest, post_maps, post_threshold);
    }
    if (*eval) return cmd_eval(eval_cfg.load(), eval_manifest, eval_maps);
    if (*sweep) return cmd_sweep(sweep_cfg.load());
    if (*experiment) return cmd_experiment(exp_cfg.load());
    if (*signature) return cmd_signature(sig_model);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
