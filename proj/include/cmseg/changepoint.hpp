#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cmseg/core.hpp"

namespace cmseg {

/// Prefix sums of the features and their squares, one column per dimension.
/// Read-only after construction and shareable across threads.
class CostCache {
 public:
  explicit CostCache(const FeatureMatrix& features);

  /// L2 segment cost over frames [s, t): sum of squared deviations from the
  /// segment mean, summed over dimensions. Throws std::invalid_argument
  /// unless 0 <= s < t <= frames().
  double l2_cost(int s, int t) const;

  int frames() const { return static_cast<int>(sum_.rows()) - 1; }

 private:
  Eigen::MatrixXd sum_;    // (T+1) x D
  Eigen::MatrixXd sumsq_;  // (T+1) x D
};

enum class DetectMethod { pelt, dynp, oracle };

std::string to_string(DetectMethod method);

/// Each changepoint k marks a segment boundary between frame k-1 and frame k.
struct ChangepointResult {
  std::vector<int> changepoints;  // strictly increasing, in [min_size, T - min_size]
  double objective = 0.0;         // total cost, plus penalty * count for penalized variants
  DetectMethod method = DetectMethod::pelt;
};

/// Exact penalized segmentation via PELT pruning. Minimizes
/// sum of segment l2 costs + penalty * (#changepoints).
/// Ties broken toward fewer changepoints, then smaller indices.
ChangepointResult pelt(const FeatureMatrix& features, double penalty, int min_size = 2);

/// Exactly num_changes changepoints minimizing total l2 cost (no penalty).
/// Throws std::invalid_argument when (num_changes + 1) * min_size > T.
ChangepointResult dynp(const FeatureMatrix& features, int num_changes, int min_size = 2);

/// Unpruned O(T^2) dynamic program with the same objective as pelt.
/// Exactness oracle; intended for T up to a few thousand.
ChangepointResult brute_force_dp(const FeatureMatrix& features, double penalty, int min_size = 2);

/// Expand each changepoint k to width frames centered on frame k-1 (the last
/// frame before the boundary), clipped to [0, frames). Width must be odd.
LabelTrack changepoints_to_track(const ChangepointResult& result, int frames, int width = 3);

/// Per-dimension standardization (subtract mean, divide by stddev).
/// Constant dimensions are left centered at zero.
FeatureMatrix standardized(const FeatureMatrix& features);

}  // namespace cmseg
