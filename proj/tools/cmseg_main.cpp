// cmseg: changepoint detection, pseudo-label fusion, boundary metrics and
// synthetic adaptation experiments over frame-feature sequences.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cmseg/adapt.hpp"
#include "cmseg/changepoint.hpp"
#include "cmseg/core.hpp"
#include "cmseg/fusion.hpp"
#include "cmseg/io.hpp"
#include "cmseg/metrics.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitInfeasible = 3;

void write_json(const json& doc, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << doc.dump(2) << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw cmseg::IoError(cmseg::IoError::Code::open_failed, "cannot open: " + path);
  out << doc.dump(2) << "\n";
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    if (!item.empty()) seeds.push_back(std::stoull(item));
  }
  if (seeds.empty()) throw std::invalid_argument("seed list is empty");
  return seeds;
}

void apply_domain_key(cmseg::DomainParams& params, const std::string& key,
                      const std::string& value) {
  if (key == "mean_sign_length") params.mean_sign_length = std::stod(value);
  else if (key == "sign_length_spread") params.sign_length_spread = std::stod(value);
  else if (key == "boundary_width_min") params.boundary_width_min = std::stoi(value);
  else if (key == "boundary_width_max") params.boundary_width_max = std::stoi(value);
  else if (key == "jump_magnitude") params.jump_magnitude = std::stod(value);
  else if (key == "boundary_energy") params.boundary_energy = std::stod(value);
  else if (key == "drift_scale") params.drift_scale = std::stod(value);
  else if (key == "noise_scale") params.noise_scale = std::stod(value);
  else throw std::invalid_argument("unknown domain parameter: " + key);
}

cmseg::ExperimentConfig parse_experiment_config(const std::string& path, json* echo) {
  cmseg::ExperimentConfig config;
  config.source.domain = "source";
  config.target = cmseg::shifted_target(config.source, 0.6, 0.4);
  bool use_changepoints = true;

  *echo = json::object();
  for (const auto& [key, value] : cmseg::read_key_values(path)) {
    (*echo)[key] = value;
    if (key == "seeds") config.seeds = parse_seed_list(value);
    else if (key == "mode") {
      if (value == "inductive") config.protocol.mode = cmseg::AdaptMode::inductive;
      else if (value == "transductive") config.protocol.mode = cmseg::AdaptMode::transductive;
      else throw std::invalid_argument("mode must be inductive or transductive");
    } else if (key == "strategy") {
      if (value == "pl") use_changepoints = false;
      else {
        use_changepoints = true;
        config.protocol.fusion.strategy = cmseg::fusion_strategy_from_string(value);
      }
    } else if (key == "adapt_enabled") config.adapt_enabled = value == "true" || value == "1";
    else if (key == "gamma") config.protocol.fusion.gamma = std::stoi(value);
    else if (key == "delta") config.protocol.fusion.delta = std::stoi(value);
    else if (key == "threshold") config.protocol.fusion.threshold = std::stod(value);
    else if (key == "insertion_first") config.protocol.fusion.insertion_first = value == "true";
    else if (key == "iterations") config.protocol.iterations = std::stoi(value);
    else if (key == "epochs") config.protocol.train.epochs = std::stoi(value);
    else if (key == "learning_rate") config.protocol.train.learning_rate = std::stod(value);
    else if (key == "smooth_weight") config.protocol.train.smooth_weight = std::stod(value);
    else if (key == "smooth_clamp") config.protocol.train.smooth_clamp = std::stod(value);
    else if (key == "penalty") config.protocol.pelt_penalty = std::stod(value);
    else if (key == "expansion_width") config.protocol.expansion_width = std::stoi(value);
    else if (key == "min_size") config.protocol.min_size = std::stoi(value);
    else if (key == "window_radius") config.window_radius = std::stoi(value);
    else if (key == "source_sequences") config.source_sequences = std::stoi(value);
    else if (key == "adapt_sequences") config.adapt_sequences = std::stoi(value);
    else if (key == "eval_sequences") config.eval_sequences = std::stoi(value);
    else if (key == "frames") { config.source.frames = std::stoi(value); config.target.frames = std::stoi(value); }
    else if (key == "dims") { config.source.dims = std::stoi(value); config.target.dims = std::stoi(value); }
    else if (key == "source_epochs") config.source_train.epochs = std::stoi(value);
    else if (key == "source_learning_rate") config.source_train.learning_rate = std::stod(value);
    else if (key.rfind("source_", 0) == 0) apply_domain_key(config.source.params, key.substr(7), value);
    else if (key.rfind("target_", 0) == 0) apply_domain_key(config.target.params, key.substr(7), value);
    else throw std::invalid_argument("unknown config key: " + key);
  }
  config.protocol.use_changepoints = use_changepoints;
  config.source_train.smooth_weight = config.protocol.train.smooth_weight;
  config.source_train.smooth_clamp = config.protocol.train.smooth_clamp;
  return config;
}

json summary_json(const std::vector<cmseg::SeedResult>& results) {
  std::vector<cmseg::EvalReport> reports;
  for (const auto& result : results) reports.push_back(result.report);
  const auto summary = cmseg::aggregate(reports);

  double count_error = 0.0;
  for (const auto& result : results) count_error += result.mean_count_error;
  count_error /= static_cast<double>(results.size());

  return json{{"mf1b_mean", summary.mf1b_mean},
              {"mf1b_stddev", summary.mf1b_stddev},
              {"mf1s_mean", summary.mf1s_mean},
              {"mf1s_stddev", summary.mf1s_stddev},
              {"pred_boundary_count", summary.pred_boundary_count},
              {"gt_boundary_count", summary.gt_boundary_count},
              {"mean_boundary_count_error", count_error},
              {"seeds", summary.reports}};
}

int run(int argc, char** argv) {
  CLI::App app{"Temporal sign segmentation toolkit: exact changepoint detection, "
               "changepoint-modulated pseudo-label fusion, boundary/segment F1 "
               "evaluation and synthetic self-training experiments."};
  app.require_subcommand(1);

  // detect
  auto* detect = app.add_subcommand("detect", "Detect changepoints in a feature file");
  std::string detect_input, detect_output, detect_method = "pelt";
  double detect_penalty = 100.0;
  int detect_num_changes = 0, detect_min_size = 2, detect_width = 3;
  bool detect_standardize = false;
  detect->add_option("--input", detect_input, "Feature file (CMSG binary)")->required();
  detect->add_option("--output", detect_output, "Output label file")->required();
  detect->add_option("--method", detect_method, "pelt | dynp")
      ->check(CLI::IsMember({"pelt", "dynp"}));
  detect->add_option("--penalty", detect_penalty, "Per-changepoint penalty (pelt)");
  detect->add_option("--num-changes", detect_num_changes, "Changepoint count (dynp)");
  detect->add_option("--min-size", detect_min_size, "Minimum segment length");
  detect->add_option("--width", detect_width, "Boundary expansion width (odd)");
  detect->add_flag("--standardize", detect_standardize, "Standardize each dimension first");

  // fuse
  auto* fuse = app.add_subcommand("fuse", "Fuse pseudo-labels with changepoint labels");
  std::string fuse_pl, fuse_cp, fuse_output, fuse_strategy = "cmpl";
  cmseg::FusionConfig fuse_config;
  fuse->add_option("--pl", fuse_pl, "Pseudo-label file")->required();
  fuse->add_option("--cp", fuse_cp, "Changepoint label file")->required();
  fuse->add_option("--output", fuse_output, "Output label file")->required();
  fuse->add_option("--strategy", fuse_strategy, "cmpl | insertion | refinement | merge | local");
  fuse->add_option("--gamma", fuse_config.gamma, "Insertion bandwidth in frames");
  fuse->add_option("--delta", fuse_config.delta, "Refinement matching window in frames");
  fuse->add_flag("--insertion-first", fuse_config.insertion_first,
                 "Run insertion before refinement in cmpl");

  // eval
  auto* eval = app.add_subcommand("eval", "Evaluate predictions against ground truth");
  std::string eval_pred, eval_gt, eval_output;
  eval->add_option("--pred", eval_pred, "Predicted label file")->required();
  eval->add_option("--gt", eval_gt, "Ground-truth label file")->required();
  eval->add_option("--output", eval_output, "Report JSON path ('-' for stdout)");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic sequence");
  cmseg::SyntheticConfig synth_config;
  std::string synth_features_out, synth_labels_out;
  synth->add_option("--seed", synth_config.seed, "Random seed");
  synth->add_option("--frames", synth_config.frames, "Sequence length");
  synth->add_option("--dims", synth_config.dims, "Feature dimensions");
  synth->add_option("--domain", synth_config.domain, "source | target");
  synth->add_option("--mean-sign-length", synth_config.params.mean_sign_length);
  synth->add_option("--sign-length-spread", synth_config.params.sign_length_spread);
  synth->add_option("--boundary-energy", synth_config.params.boundary_energy);
  synth->add_option("--jump-magnitude", synth_config.params.jump_magnitude);
  synth->add_option("--noise-scale", synth_config.params.noise_scale);
  synth->add_option("--drift-scale", synth_config.params.drift_scale);
  synth->add_option("--features-out", synth_features_out, "Feature file path")->required();
  synth->add_option("--labels-out", synth_labels_out, "Label file path")->required();

  // adapt
  auto* adapt = app.add_subcommand("adapt", "Run a self-training adaptation experiment");
  std::string adapt_config_path, adapt_output;
  adapt->add_option("--config", adapt_config_path, "Experiment config (key = value lines)")
      ->required();
  adapt->add_option("--output", adapt_output, "Report JSON path ('-' for stdout)");

  // render
  auto* render = app.add_subcommand("render", "Render label tracks as an SVG timeline");
  std::vector<std::string> render_tracks;
  std::string render_output;
  render->add_option("--track", render_tracks, "NAME=labelfile (repeatable)")->required();
  render->add_option("--output", render_output, "SVG output path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (detect->parsed()) {
    cmseg::FeatureMatrix features = cmseg::read_features(detect_input);
    if (detect_standardize) features = cmseg::standardized(features);
    cmseg::ChangepointResult result;
    if (detect_method == "pelt") {
      result = cmseg::pelt(features, detect_penalty, detect_min_size);
    } else {
      result = cmseg::dynp(features, detect_num_changes, detect_min_size);
    }
    const auto track = cmseg::changepoints_to_track(
        result, static_cast<int>(features.frames()), detect_width);
    cmseg::write_labels(track, detect_output, features.fps);
  } else if (fuse->parsed()) {
    fuse_config.strategy = cmseg::fusion_strategy_from_string(fuse_strategy);
    const auto pl = cmseg::read_labels(fuse_pl);
    const auto cp = cmseg::read_labels(fuse_cp);
    cmseg::write_labels(cmseg::apply_fusion(pl, cp, fuse_config), fuse_output);
  } else if (eval->parsed()) {
    const auto pred = cmseg::read_labels(eval_pred);
    const auto gt = cmseg::read_labels(eval_gt);
    const auto report = cmseg::evaluate(pred, gt);
    json doc{{"tool_version", cmseg::kToolVersion},
             {"metrics", cmseg::report_to_json(report)},
             {"pred", eval_pred},
             {"gt", eval_gt}};
    write_json(doc, eval_output);
  } else if (synth->parsed()) {
    const auto [features, labels] = cmseg::synth_generate(synth_config);
    cmseg::write_features(features, synth_features_out);
    cmseg::write_labels(labels, synth_labels_out, features.fps);
  } else if (adapt->parsed()) {
    json echo;
    const auto config = parse_experiment_config(adapt_config_path, &echo);
    const auto results = cmseg::run_experiment(config);
    json per_seed = json::array();
    for (const auto& result : results) {
      json sequences = json::array();
      for (const auto& report : result.per_sequence) sequences.push_back(cmseg::report_to_json(report));
      per_seed.push_back(json{{"seed", result.seed},
                              {"report", cmseg::report_to_json(result.report)},
                              {"mean_boundary_count_error", result.mean_count_error},
                              {"per_sequence", sequences}});
    }
    json seeds = json::array();
    for (auto seed : config.seeds) seeds.push_back(seed);
    json doc{{"tool_version", cmseg::kToolVersion},
             {"config", echo},
             {"seeds", seeds},
             {"metrics", summary_json(results)},
             {"per_seed", per_seed}};
    write_json(doc, adapt_output);
  } else if (render->parsed()) {
    std::vector<std::pair<std::string, cmseg::LabelTrack>> tracks;
    for (const auto& spec : render_tracks) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos) {
        throw CLI::ValidationError("--track", "expected NAME=labelfile, got: " + spec);
      }
      tracks.emplace_back(spec.substr(0, eq), cmseg::read_labels(spec.substr(eq + 1)));
    }
    cmseg::render_timeline(tracks, render_output);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const cmseg::IoError& error) {
    std::cerr << "io error: " << error.what() << "\n";
    return kExitIo;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kExitInfeasible;
  }
}
