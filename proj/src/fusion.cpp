#include "cmseg/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace cmseg {

namespace {

void check_lengths(const LabelTrack& pl, const LabelTrack& cp) {
  if (pl.size() != cp.size()) throw std::invalid_argument("track length mismatch");
}

}  // namespace

std::string to_string(FusionStrategy strategy) {
  switch (strategy) {
    case FusionStrategy::cmpl: return "cmpl";
    case FusionStrategy::insertion_only: return "insertion_only";
    case FusionStrategy::refinement_only: return "refinement_only";
    case FusionStrategy::merge: return "merge";
    case FusionStrategy::local: return "local";
  }
  return "unknown";
}

FusionStrategy fusion_strategy_from_string(const std::string& name) {
  if (name == "cmpl") return FusionStrategy::cmpl;
  if (name == "insertion_only" || name == "insertion") return FusionStrategy::insertion_only;
  if (name == "refinement_only" || name == "refinement") return FusionStrategy::refinement_only;
  if (name == "merge") return FusionStrategy::merge;
  if (name == "local") return FusionStrategy::local;
  throw std::invalid_argument("unknown fusion strategy: " + name);
}

LabelTrack threshold_probs(const ProbTrack& probs, double threshold) {
  LabelTrack track(probs.size(), 0);
  for (std::size_t i = 0; i < probs.size(); ++i) track[i] = probs[i] > threshold ? 1 : 0;
  return track;
}

LabelTrack insertion(const LabelTrack& pl, const LabelTrack& cp, int gamma) {
  check_lengths(pl, cp);
  if (gamma < 1) throw std::invalid_argument("gamma must be >= 1");
  const int n = static_cast<int>(pl.size());

  // prefix[i] = number of pl 1s in frames [0, i)
  std::vector<int> prefix(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 0; i < n; ++i) prefix[static_cast<std::size_t>(i) + 1] = prefix[static_cast<std::size_t>(i)] + pl[static_cast<std::size_t>(i)];

  LabelTrack out(pl.size(), 0);
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - gamma + 1);
    const int hi = std::min(n, i + gamma);  // window [lo, hi)
    const bool window_empty = prefix[static_cast<std::size_t>(hi)] - prefix[static_cast<std::size_t>(lo)] == 0;
    out[static_cast<std::size_t>(i)] = window_empty ? cp[static_cast<std::size_t>(i)] : pl[static_cast<std::size_t>(i)];
  }
  return out;
}

LabelTrack refinement(const LabelTrack& pl, const LabelTrack& cp, int delta) {
  check_lengths(pl, cp);
  if (delta < 0) throw std::invalid_argument("delta must be >= 0");
  const int n = static_cast<int>(pl.size());

  const auto pl_runs = extract_runs(pl);
  const auto cp_runs = extract_runs(cp);

  // Greedy one-to-one matching by ascending center distance, ties broken by
  // the earlier pl run, then the earlier cp run.
  struct Pair {
    int dist;
    std::size_t pl_idx;
    std::size_t cp_idx;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < pl_runs.size(); ++i) {
    for (std::size_t j = 0; j < cp_runs.size(); ++j) {
      const int dist = std::abs(run_center(pl_runs[i]) - run_center(cp_runs[j]));
      if (dist <= delta) pairs.push_back({dist, i, j});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return std::tie(a.dist, a.pl_idx, a.cp_idx) < std::tie(b.dist, b.pl_idx, b.cp_idx);
  });

  std::vector<int> shift(pl_runs.size(), 0);
  std::vector<bool> pl_used(pl_runs.size(), false), cp_used(cp_runs.size(), false);
  for (const auto& p : pairs) {
    if (pl_used[p.pl_idx] || cp_used[p.cp_idx]) continue;
    pl_used[p.pl_idx] = true;
    cp_used[p.cp_idx] = true;
    const int diff = run_center(cp_runs[p.cp_idx]) - run_center(pl_runs[p.pl_idx]);
    // Half the center distance, half-frames rounded toward the cp side.
    shift[p.pl_idx] = diff >= 0 ? (diff + 1) / 2 : -((-diff + 1) / 2);
  }

  // Place runs left to right. Each run is clamped against the previous
  // placed run and the next run's original position, so the interval always
  // contains the original placement and runs never merge.
  std::vector<BoundaryRun> placed;
  placed.reserve(pl_runs.size());
  int prev_end = -2;
  for (std::size_t i = 0; i < pl_runs.size(); ++i) {
    const BoundaryRun& run = pl_runs[i];
    const int len = run.length();
    const int lo = prev_end + 2;
    int hi = n - 1;
    if (i + 1 < pl_runs.size()) hi = std::min(hi, pl_runs[i + 1].start - 2);
    const int start = std::clamp(run.start + shift[i], lo, hi - len + 1);
    placed.push_back({start, start + len - 1});
    prev_end = placed.back().end;
  }
  return runs_to_track(placed, n);
}

LabelTrack cmpl(const LabelTrack& pl, const LabelTrack& cp, const FusionConfig& config) {
  if (config.insertion_first) {
    return refinement(insertion(pl, cp, config.gamma), cp, config.delta);
  }
  return insertion(refinement(pl, cp, config.delta), cp, config.gamma);
}

LabelTrack merge_union(const LabelTrack& pl, const LabelTrack& cp) {
  check_lengths(pl, cp);
  LabelTrack out(pl.size(), 0);
  for (std::size_t i = 0; i < pl.size(); ++i) out[i] = (pl[i] || cp[i]) ? 1 : 0;
  return out;
}

LabelTrack local_fusion(const LabelTrack& pl, const LabelTrack& cp) {
  check_lengths(pl, cp);
  const auto segments = segments_of(pl);
  LabelTrack out = pl;
  if (segments.empty()) return out;

  double mean_length = 0.0;
  for (const auto& seg : segments) mean_length += seg.length();
  mean_length /= static_cast<double>(segments.size());

  for (const auto& seg : segments) {
    if (static_cast<double>(seg.length()) <= mean_length) continue;
    for (int i = seg.start; i <= seg.end; ++i) {
      if (cp[static_cast<std::size_t>(i)]) out[static_cast<std::size_t>(i)] = 1;
    }
  }
  return out;
}

LabelTrack apply_fusion(const LabelTrack& pl, const LabelTrack& cp, const FusionConfig& config) {
  switch (config.strategy) {
    case FusionStrategy::cmpl: return cmpl(pl, cp, config);
    case FusionStrategy::insertion_only: return insertion(pl, cp, config.gamma);
    case FusionStrategy::refinement_only: return refinement(pl, cp, config.delta);
    case FusionStrategy::merge: return merge_union(pl, cp);
    case FusionStrategy::local: return local_fusion(pl, cp);
  }
  throw std::invalid_argument("unknown fusion strategy");
}

}  // namespace cmseg
