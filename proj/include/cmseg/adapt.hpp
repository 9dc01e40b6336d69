#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cmseg/core.hpp"
#include "cmseg/fusion.hpp"
#include "cmseg/metrics.hpp"

namespace cmseg {

/// Shape of one synthetic domain. Dimension 0 carries a motion-energy
/// channel that rises during boundary runs; the remaining dimensions are
/// piecewise-constant levels that jump at each boundary.
struct DomainParams {
  double mean_sign_length = 20.0;
  double sign_length_spread = 5.0;
  int boundary_width_min = 2;
  int boundary_width_max = 3;
  double jump_magnitude = 2.0;     // feature level jump at boundaries
  double boundary_energy = 3.0;    // motion-energy amplitude on dim 0
  double drift_scale = 0.01;       // per-frame within-sign slope scale
  double noise_scale = 0.3;
};

struct SyntheticConfig {
  std::uint64_t seed = 0;
  int frames = 400;
  int dims = 6;
  std::string domain = "source";  // source | target
  DomainParams params;
};

/// Piecewise signal with level jumps at ground-truth boundary runs plus
/// noise; deterministic given the seed. Throws std::invalid_argument on
/// infeasible configs (mean sign length < 2x boundary width, frames too
/// small, non-positive scales).
std::pair<FeatureMatrix, LabelTrack> synth_generate(const SyntheticConfig& config);

struct TrainParams {
  double learning_rate = 0.2;
  int epochs = 10;
  double smooth_weight = 0.15;  // lambda
  double smooth_clamp = 4.0;    // tau, clamp on adjacent log-prob differences
};

/// Windowed logistic per-frame boundary classifier: sigmoid of a linear
/// response over 2w+1 frames of zero-padded feature context plus a bias.
class ToySegmenter {
 public:
  ToySegmenter(int window_radius, int dims);

  ProbTrack predict_probs(const FeatureMatrix& features) const;

  int window_radius() const { return window_radius_; }
  int dims() const { return dims_; }

  Eigen::VectorXd& weights() { return weights_; }
  const Eigen::VectorXd& weights() const { return weights_; }

 private:
  int window_radius_;
  int dims_;
  Eigen::VectorXd weights_;  // (2w+1)*D features + bias, bias last
};

using LabelledSequence = std::pair<FeatureMatrix, LabelTrack>;

/// Loss on one sequence: class-weighted per-frame cross-entropy plus
/// smooth_weight times the truncated squared difference of adjacent
/// log-probabilities (both classes, clamped at smooth_clamp). Class weights
/// are inverse label frequencies over the sequence. If gradient is non-null
/// it receives dLoss/dWeights.
double sequence_loss(const ToySegmenter& model, const FeatureMatrix& features,
                     const LabelTrack& labels, const TrainParams& params,
                     Eigen::VectorXd* gradient = nullptr);

/// Full-batch gradient descent over the dataset, one step per sequence per
/// epoch in a fixed order. Deterministic.
ToySegmenter train_supervised(ToySegmenter model, const std::vector<LabelledSequence>& data,
                              const TrainParams& params);

enum class AdaptMode { inductive, transductive };

std::string to_string(AdaptMode mode);

struct AdaptProtocol {
  AdaptMode mode = AdaptMode::transductive;
  bool use_changepoints = true;  // false: plain pseudo-label self-training
  FusionConfig fusion;
  int iterations = 1;
  TrainParams train;       // epochs here are per iteration
  double pelt_penalty = 100.0;
  int expansion_width = 3;
  int min_size = 2;
};

/// Source-free self-training: per iteration, predict on each target
/// sequence, threshold, optionally fuse with PELT changepoints, and finetune
/// on the resulting labels. Only target sequences are visible here.
ToySegmenter self_train(ToySegmenter model, const std::vector<FeatureMatrix>& target_features,
                        const AdaptProtocol& protocol);

/// num_segments - 1 boundary runs of the given width centered at
/// floor(i * frames / num_segments).
LabelTrack uniform_baseline(int frames, int num_segments, int boundary_width = 3);

/// One full synthetic experiment: source training, self-training on the
/// target, evaluation on held-out (inductive) or the same (transductive)
/// target sequences.
struct ExperimentConfig {
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  int source_sequences = 6;
  int adapt_sequences = 4;  // used in inductive mode only
  int eval_sequences = 4;
  int window_radius = 4;
  SyntheticConfig source;
  SyntheticConfig target;
  TrainParams source_train;
  AdaptProtocol protocol;
  bool adapt_enabled = true;  // false: evaluate the source model directly
};

struct SeedResult {
  std::uint64_t seed = 0;
  EvalReport report;               // aggregated over eval sequences
  double mean_count_error = 0.0;   // mean |#pred - #gt| boundary runs
  std::vector<EvalReport> per_sequence;
};

SeedResult run_experiment_seed(const ExperimentConfig& config, std::uint64_t seed);

std::vector<SeedResult> run_experiment(const ExperimentConfig& config);

/// Target config for the standard shifted-domain experiment: mean sign
/// length scaled by length_ratio, boundary energy scaled by energy_ratio.
SyntheticConfig shifted_target(const SyntheticConfig& source, double length_ratio,
                               double energy_ratio);

}  // namespace cmseg
