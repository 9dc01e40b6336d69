#include "cmseg/changepoint.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

namespace cmseg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Cell {
  double cost = kInf;
  int num_changes = 0;
  int prev = -1;
};

// Strictly better under (cost, #changepoints, split index) lexicographic
// order; candidates are visited in ascending split order so ties keep the
// smaller index.
bool improves(const Cell& best, double cost, int num_changes) {
  if (cost != best.cost) return cost < best.cost;
  return num_changes < best.num_changes;
}

std::vector<int> backtrack(const std::vector<Cell>& table, int t) {
  std::vector<int> changepoints;
  while (t > 0 && table[static_cast<std::size_t>(t)].prev > 0) {
    t = table[static_cast<std::size_t>(t)].prev;
    changepoints.push_back(t);
  }
  std::reverse(changepoints.begin(), changepoints.end());
  return changepoints;
}

void check_penalized_args(const FeatureMatrix& features, double penalty, int min_size) {
  validate(features);
  if (penalty < 0.0) throw std::invalid_argument("penalty must be >= 0");
  if (min_size < 1 || min_size > features.frames()) {
    throw std::invalid_argument("min_size must be in [1, frames]");
  }
}

ChangepointResult penalized_dp(const FeatureMatrix& features, double penalty, int min_size,
                               bool prune, DetectMethod method) {
  check_penalized_args(features, penalty, min_size);
  const CostCache cache(features);
  const int n = cache.frames();

  std::vector<Cell> table(static_cast<std::size_t>(n) + 1);
  table[0] = {-penalty, 0, -1};

  std::vector<int> candidates;
  for (int t = 1; t <= n; ++t) {
    const int admit = t - min_size;
    if (admit == 0 || admit >= min_size) candidates.push_back(admit);

    Cell best;
    std::vector<double> path_cost(candidates.size(), kInf);
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const int s = candidates[c];
      const Cell& from = table[static_cast<std::size_t>(s)];
      if (from.cost == kInf) continue;
      path_cost[c] = from.cost + cache.l2_cost(s, t);
      const double total = path_cost[c] + penalty;
      const int num_changes = from.num_changes + (s > 0 ? 1 : 0);
      if (improves(best, total, num_changes)) best = {total, num_changes, s};
    }
    table[static_cast<std::size_t>(t)] = best;

    if (prune && best.cost != kInf) {
      std::vector<int> kept;
      kept.reserve(candidates.size());
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (path_cost[c] <= best.cost) kept.push_back(candidates[c]);
      }
      candidates.swap(kept);
    }
  }

  ChangepointResult result;
  result.changepoints = backtrack(table, n);
  result.objective = table[static_cast<std::size_t>(n)].cost;
  result.method = method;
  return result;
}

}  // namespace

CostCache::CostCache(const FeatureMatrix& features) {
  const Eigen::Index n = features.frames();
  const Eigen::Index d = features.dims();
  sum_.setZero(n + 1, d);
  sumsq_.setZero(n + 1, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    sum_.row(i + 1) = sum_.row(i) + features.values.row(i);
    sumsq_.row(i + 1) = sumsq_.row(i) + features.values.row(i).cwiseAbs2();
  }
}

double CostCache::l2_cost(int s, int t) const {
  if (s < 0 || s >= t || t > frames()) {
    throw std::invalid_argument("l2_cost requires 0 <= s < t <= frames");
  }
  const double n = static_cast<double>(t - s);
  double cost = 0.0;
  for (Eigen::Index d = 0; d < sum_.cols(); ++d) {
    const double seg_sum = sum_(t, d) - sum_(s, d);
    const double seg_sumsq = sumsq_(t, d) - sumsq_(s, d);
    cost += seg_sumsq - seg_sum * seg_sum / n;
  }
  return std::max(cost, 0.0);
}

std::string to_string(DetectMethod method) {
  switch (method) {
    case DetectMethod::pelt: return "pelt";
    case DetectMethod::dynp: return "dynp";
    case DetectMethod::oracle: return "oracle";
  }
  return "unknown";
}

ChangepointResult pelt(const FeatureMatrix& features, double penalty, int min_size) {
  return penalized_dp(features, penalty, min_size, /*prune=*/true, DetectMethod::pelt);
}

ChangepointResult brute_force_dp(const FeatureMatrix& features, double penalty, int min_size) {
  return penalized_dp(features, penalty, min_size, /*prune=*/false, DetectMethod::oracle);
}

ChangepointResult dynp(const FeatureMatrix& features, int num_changes, int min_size) {
  validate(features);
  const int n = static_cast<int>(features.frames());
  if (num_changes < 0) throw std::invalid_argument("number of changepoints must be >= 0");
  if (min_size < 1 || (num_changes + 1) * min_size > n) {
    throw std::invalid_argument("infeasible changepoint count for this signal length");
  }
  const CostCache cache(features);

  // best[k][t]: minimal cost covering [0, t) with exactly k changepoints.
  std::vector<std::vector<double>> best(
      static_cast<std::size_t>(num_changes) + 1,
      std::vector<double>(static_cast<std::size_t>(n) + 1, kInf));
  std::vector<std::vector<int>> prev(
      static_cast<std::size_t>(num_changes) + 1,
      std::vector<int>(static_cast<std::size_t>(n) + 1, -1));

  for (int t = min_size; t <= n; ++t) best[0][static_cast<std::size_t>(t)] = cache.l2_cost(0, t);
  for (int k = 1; k <= num_changes; ++k) {
    for (int t = (k + 1) * min_size; t <= n; ++t) {
      for (int s = k * min_size; s + min_size <= t; ++s) {
        const double left = best[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(s)];
        if (left == kInf) continue;
        const double total = left + cache.l2_cost(s, t);
        if (total < best[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)]) {
          best[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)] = total;
          prev[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)] = s;
        }
      }
    }
  }

  ChangepointResult result;
  result.method = DetectMethod::dynp;
  result.objective = best[static_cast<std::size_t>(num_changes)][static_cast<std::size_t>(n)];
  int t = n;
  for (int k = num_changes; k >= 1; --k) {
    t = prev[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)];
    result.changepoints.push_back(t);
  }
  std::reverse(result.changepoints.begin(), result.changepoints.end());
  return result;
}

LabelTrack changepoints_to_track(const ChangepointResult& result, int frames, int width) {
  if (width < 1 || width % 2 == 0) throw std::invalid_argument("expansion width must be odd and >= 1");
  LabelTrack track(static_cast<std::size_t>(frames), 0);
  const int half = width / 2;
  for (int k : result.changepoints) {
    // k marks the boundary between frames k-1 and k; the expansion is
    // centered on the last frame of the left segment.
    const int lo = std::max(0, k - 1 - half);
    const int hi = std::min(frames - 1, k - 1 + half);
    for (int i = lo; i <= hi; ++i) track[static_cast<std::size_t>(i)] = 1;
  }
  return track;
}

FeatureMatrix standardized(const FeatureMatrix& features) {
  validate(features);
  FeatureMatrix out = features;
  const double n = static_cast<double>(out.frames());
  for (Eigen::Index d = 0; d < out.dims(); ++d) {
    auto col = out.values.col(d);
    col.array() -= col.mean();
    const double stddev = std::sqrt(col.squaredNorm() / n);
    if (stddev > 0.0) col /= stddev;
  }
  return out;
}

}  // namespace cmseg
