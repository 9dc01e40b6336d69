#include "cmseg/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "cmseg/changepoint.hpp"

namespace cmseg {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void check_synth_config(const SyntheticConfig& config) {
  const DomainParams& p = config.params;
  if (config.frames < 8 || config.dims < 1) {
    throw std::invalid_argument("synthetic signal needs at least 8 frames and 1 dimension");
  }
  if (p.boundary_width_min < 1 || p.boundary_width_max < p.boundary_width_min) {
    throw std::invalid_argument("invalid boundary width range");
  }
  if (p.mean_sign_length < 2.0 * p.boundary_width_max) {
    throw std::invalid_argument("mean sign length must be at least twice the boundary width");
  }
  if (p.mean_sign_length + p.boundary_width_max + 2.0 > config.frames) {
    throw std::invalid_argument("frames too small for the configured sign length");
  }
  if (p.sign_length_spread < 0.0 || p.noise_scale < 0.0 || p.drift_scale < 0.0) {
    throw std::invalid_argument("spread and scale parameters must be >= 0");
  }
}

}  // namespace

std::pair<FeatureMatrix, LabelTrack> synth_generate(const SyntheticConfig& config) {
  check_synth_config(config);
  const DomainParams& p = config.params;
  const int n = config.frames;
  const int d = config.dims;
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> unit_normal(0.0, 1.0);
  std::uniform_int_distribution<int> width_dist(p.boundary_width_min, p.boundary_width_max);
  std::uniform_real_distribution<double> jump_scale(0.5, 1.5);

  const auto sample_sign_length = [&] {
    const double raw = p.mean_sign_length + p.sign_length_spread * unit_normal(rng);
    return std::max(2, static_cast<int>(std::lround(raw)));
  };

  // Alternate sign segments and boundary runs; a boundary is only placed if
  // at least two sign frames remain after it.
  LabelTrack labels(static_cast<std::size_t>(n), 0);
  std::vector<BoundaryRun> runs;
  int pos = sample_sign_length();
  while (true) {
    const int width = width_dist(rng);
    if (pos + width + 2 > n) break;
    runs.push_back({pos, pos + width - 1});
    for (int i = pos; i < pos + width; ++i) labels[static_cast<std::size_t>(i)] = 1;
    pos += width + sample_sign_length();
  }

  FeatureMatrix features;
  features.values.setZero(n, d);

  // Dimension 0: motion-energy channel, high during boundary runs.
  for (int t = 0; t < n; ++t) {
    features.values(t, 0) = (labels[static_cast<std::size_t>(t)] ? p.boundary_energy : 0.0);
  }

  // Remaining dimensions: piecewise-constant levels that jump at every
  // boundary-run start, with a small per-segment drift slope.
  for (int dim = 1; dim < d; ++dim) {
    std::uniform_real_distribution<double> level_dist(-1.0, 1.0);
    double level = level_dist(rng);
    double slope = p.drift_scale * unit_normal(rng);
    std::size_t next_run = 0;
    int segment_start = 0;
    for (int t = 0; t < n; ++t) {
      if (next_run < runs.size() && t == runs[next_run].start) {
        // bounded level walk: flip the jump direction when it would leave [-4, 4]
        double direction = (rng() & 1) ? 1.0 : -1.0;
        const double magnitude = p.jump_magnitude * jump_scale(rng);
        if (std::abs(level + direction * magnitude) > 4.0) direction = -direction;
        level += direction * magnitude;
        slope = p.drift_scale * unit_normal(rng);
        segment_start = t;
        ++next_run;
      }
      features.values(t, dim) = level + slope * (t - segment_start);
    }
  }

  if (p.noise_scale > 0.0) {
    for (int t = 0; t < n; ++t) {
      for (int dim = 0; dim < d; ++dim) {
        features.values(t, dim) += p.noise_scale * unit_normal(rng);
      }
    }
  }
  return {std::move(features), std::move(labels)};
}

ToySegmenter::ToySegmenter(int window_radius, int dims)
    : window_radius_(window_radius), dims_(dims) {
  if (window_radius < 0 || dims < 1) throw std::invalid_argument("invalid segmenter shape");
  weights_ = Eigen::VectorXd::Zero((2 * window_radius + 1) * dims + 1);
}

ProbTrack ToySegmenter::predict_probs(const FeatureMatrix& features) const {
  if (features.dims() != dims_) throw std::invalid_argument("feature dimension mismatch");
  const int n = static_cast<int>(features.frames());
  const int w = window_radius_;
  ProbTrack probs(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    double z = weights_(weights_.size() - 1);  // bias
    for (int o = -w; o <= w; ++o) {
      const int src = t + o;
      if (src < 0 || src >= n) continue;  // zero padding
      const int base = (o + w) * dims_;
      for (int dim = 0; dim < dims_; ++dim) {
        z += weights_(base + dim) * features.values(src, dim);
      }
    }
    probs[static_cast<std::size_t>(t)] = sigmoid(z);
  }
  return probs;
}

double sequence_loss(const ToySegmenter& model, const FeatureMatrix& features,
                     const LabelTrack& labels, const TrainParams& params,
                     Eigen::VectorXd* gradient) {
  if (features.dims() != model.dims()) throw std::invalid_argument("feature dimension mismatch");
  const int n = static_cast<int>(features.frames());
  if (static_cast<int>(labels.size()) != n) throw std::invalid_argument("label length mismatch");
  const int w = model.window_radius();
  const int d = model.dims();

  const ProbTrack probs = model.predict_probs(features);

  int ones = 0;
  for (auto label : labels) ones += label;
  const int zeros = n - ones;
  const double weight_one = ones > 0 ? n / (2.0 * ones) : 0.0;
  const double weight_zero = zeros > 0 ? n / (2.0 * zeros) : 0.0;

  // dLoss/dz per frame; mapped back through the windows at the end.
  Eigen::VectorXd dz = Eigen::VectorXd::Zero(n);
  double loss = 0.0;

  constexpr double kEps = 1e-12;
  for (int t = 0; t < n; ++t) {
    const double p = probs[static_cast<std::size_t>(t)];
    const double y = labels[static_cast<std::size_t>(t)];
    const double weight = y > 0.5 ? weight_one : weight_zero;
    loss -= weight * (y * std::log(p + kEps) + (1.0 - y) * std::log(1.0 - p + kEps)) / n;
    dz(t) += weight * (p - y) / n;
  }

  // Truncated squared difference of adjacent log-probabilities, both classes.
  if (n > 1 && params.smooth_weight > 0.0) {
    const double tau = params.smooth_clamp;
    const double norm = 1.0 / (2.0 * (n - 1));
    for (int t = 1; t < n; ++t) {
      const double p1 = probs[static_cast<std::size_t>(t)];
      const double p0 = probs[static_cast<std::size_t>(t - 1)];
      const double d_pos = std::log(p1 + kEps) - std::log(p0 + kEps);
      const double d_neg = std::log(1.0 - p1 + kEps) - std::log(1.0 - p0 + kEps);
      const double c_pos = std::clamp(d_pos, -tau, tau);
      const double c_neg = std::clamp(d_neg, -tau, tau);
      loss += params.smooth_weight * norm * (c_pos * c_pos + c_neg * c_neg);
      if (std::abs(d_pos) < tau) {
        const double g = params.smooth_weight * norm * 2.0 * c_pos;
        dz(t) += g * (1.0 - p1);
        dz(t - 1) -= g * (1.0 - p0);
      }
      if (std::abs(d_neg) < tau) {
        const double g = params.smooth_weight * norm * 2.0 * c_neg;
        dz(t) += g * (-p1);
        dz(t - 1) -= g * (-p0);
      }
    }
  }

  if (gradient != nullptr) {
    gradient->setZero((2 * w + 1) * d + 1);
    for (int t = 0; t < n; ++t) {
      const double g = dz(t);
      if (g == 0.0) continue;
      for (int o = -w; o <= w; ++o) {
        const int src = t + o;
        if (src < 0 || src >= n) continue;
        const int base = (o + w) * d;
        for (int dim = 0; dim < d; ++dim) {
          (*gradient)(base + dim) += g * features.values(src, dim);
        }
      }
      (*gradient)(gradient->size() - 1) += g;
    }
  }
  return loss;
}

ToySegmenter train_supervised(ToySegmenter model, const std::vector<LabelledSequence>& data,
                              const TrainParams& params) {
  if (data.empty()) throw std::invalid_argument("training data must be nonempty");
  for (const auto& [features, labels] : data) {
    if (features.dims() != model.dims()) throw std::invalid_argument("feature dimension mismatch");
    if (labels.size() != static_cast<std::size_t>(features.frames())) {
      throw std::invalid_argument("label length mismatch");
    }
  }
  Eigen::VectorXd gradient(model.weights().size());
  Eigen::VectorXd step(model.weights().size());
  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    step.setZero();
    for (const auto& [features, labels] : data) {
      sequence_loss(model, features, labels, params, &gradient);
      step += gradient;
    }
    model.weights() -= params.learning_rate / static_cast<double>(data.size()) * step;
  }
  return model;
}

std::string to_string(AdaptMode mode) {
  return mode == AdaptMode::inductive ? "inductive" : "transductive";
}

ToySegmenter self_train(ToySegmenter model, const std::vector<FeatureMatrix>& target_features,
                        const AdaptProtocol& protocol) {
  if (target_features.empty()) throw std::invalid_argument("target set must be nonempty");
  if (protocol.iterations < 1) throw std::invalid_argument("iterations must be >= 1");

  // Changepoints depend only on the features, so compute them once.
  std::vector<LabelTrack> cp_tracks;
  if (protocol.use_changepoints) {
    cp_tracks.reserve(target_features.size());
    for (const auto& features : target_features) {
      const auto result = pelt(features, protocol.pelt_penalty, protocol.min_size);
      cp_tracks.push_back(changepoints_to_track(result, static_cast<int>(features.frames()),
                                                protocol.expansion_width));
    }
  }

  for (int iteration = 0; iteration < protocol.iterations; ++iteration) {
    std::vector<LabelledSequence> round;
    round.reserve(target_features.size());
    for (std::size_t i = 0; i < target_features.size(); ++i) {
      const ProbTrack probs = model.predict_probs(target_features[i]);
      LabelTrack labels = threshold_probs(probs, protocol.fusion.threshold);
      if (protocol.use_changepoints) {
        labels = apply_fusion(labels, cp_tracks[i], protocol.fusion);
      }
      round.emplace_back(target_features[i], std::move(labels));
    }
    model = train_supervised(std::move(model), round, protocol.train);
  }
  return model;
}

LabelTrack uniform_baseline(int frames, int num_segments, int boundary_width) {
  if (num_segments < 1 || frames < 1 || boundary_width < 1) {
    throw std::invalid_argument("invalid uniform baseline arguments");
  }
  if (boundary_width > frames) throw std::invalid_argument("boundary width exceeds track length");
  std::vector<BoundaryRun> runs;
  const int half = boundary_width / 2;
  for (int i = 1; i < num_segments; ++i) {
    const int center = static_cast<int>(static_cast<long long>(i) * frames / num_segments);
    const int start = std::clamp(center - half, 0, frames - boundary_width);
    runs.push_back({start, start + boundary_width - 1});
  }
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (runs[i].start <= runs[i - 1].end + 1) {
      throw std::invalid_argument("uniform baseline boundaries would touch");
    }
  }
  return runs_to_track(runs, frames);
}

SyntheticConfig shifted_target(const SyntheticConfig& source, double length_ratio,
                               double energy_ratio) {
  SyntheticConfig target = source;
  target.domain = "target";
  target.params.mean_sign_length *= length_ratio;
  target.params.sign_length_spread *= length_ratio;
  target.params.boundary_energy *= energy_ratio;
  return target;
}

SeedResult run_experiment_seed(const ExperimentConfig& config, std::uint64_t seed) {
  const std::uint64_t base = seed * 1000003ull + 17ull;
  const auto make = [&](const SyntheticConfig& domain, std::uint64_t stream, int index) {
    SyntheticConfig c = domain;
    c.seed = base + stream * 1000ull + static_cast<std::uint64_t>(index);
    return synth_generate(c);
  };

  std::vector<LabelledSequence> source_data;
  for (int i = 0; i < config.source_sequences; ++i) source_data.push_back(make(config.source, 1, i));

  ToySegmenter model(config.window_radius, config.source.dims);
  model = train_supervised(std::move(model), source_data, config.source_train);
  source_data.clear();  // source-free from here on

  std::vector<LabelledSequence> eval_data;
  for (int i = 0; i < config.eval_sequences; ++i) eval_data.push_back(make(config.target, 3, i));

  if (config.adapt_enabled) {
    std::vector<FeatureMatrix> adapt_features;
    if (config.protocol.mode == AdaptMode::transductive) {
      for (const auto& [features, labels] : eval_data) adapt_features.push_back(features);
    } else {
      for (int i = 0; i < config.adapt_sequences; ++i) {
        adapt_features.push_back(make(config.target, 2, i).first);
      }
    }
    model = self_train(std::move(model), adapt_features, config.protocol);
  }

  SeedResult result;
  result.seed = seed;
  double count_error = 0.0;
  for (const auto& [features, gt] : eval_data) {
    const ProbTrack probs = model.predict_probs(features);
    const LabelTrack pred = threshold_probs(probs, config.protocol.fusion.threshold);
    EvalReport report = evaluate(pred, gt);
    count_error += std::abs(report.pred_boundary_count - report.gt_boundary_count);
    result.per_sequence.push_back(std::move(report));
  }
  result.mean_count_error = count_error / static_cast<double>(eval_data.size());

  EvalReport combined;
  combined.seeds_aggregated = static_cast<int>(result.per_sequence.size());
  for (const auto& report : result.per_sequence) {
    combined.mf1b += report.mf1b;
    combined.mf1s += report.mf1s;
    combined.pred_boundary_count += report.pred_boundary_count;
    combined.gt_boundary_count += report.gt_boundary_count;
    for (const auto& [threshold, f1] : report.per_threshold_f1b) {
      combined.per_threshold_f1b[threshold] += f1;
    }
    for (const auto& [threshold, f1] : report.per_threshold_f1s) {
      combined.per_threshold_f1s[threshold] += f1;
    }
  }
  const double n = static_cast<double>(result.per_sequence.size());
  combined.mf1b /= n;
  combined.mf1s /= n;
  for (auto& [threshold, f1] : combined.per_threshold_f1b) f1 /= n;
  for (auto& [threshold, f1] : combined.per_threshold_f1s) f1 /= n;
  result.report = std::move(combined);
  return result;
}

std::vector<SeedResult> run_experiment(const ExperimentConfig& config) {
  std::vector<SeedResult> results;
  results.reserve(config.seeds.size());
  for (std::uint64_t seed : config.seeds) results.push_back(run_experiment_seed(config, seed));
  return results;
}

}  // namespace cmseg
