#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace cmseg {

/// Binary per-frame boundary labels; every entry is 0 or 1.
using LabelTrack = std::vector<std::uint8_t>;

/// Per-frame boundary posterior probabilities in [0,1].
using ProbTrack = std::vector<double>;

/// T x D per-frame feature sequence (rows = frames).
struct FeatureMatrix {
  Eigen::MatrixXd values;
  double fps = 25.0;

  Eigen::Index frames() const { return values.rows(); }
  Eigen::Index dims() const { return values.cols(); }
};

/// Throws std::invalid_argument if the matrix is empty, non-finite or fps <= 0.
void validate(const FeatureMatrix& features);

/// One maximal contiguous run of 1-labels, inclusive on both ends.
struct BoundaryRun {
  int start = 0;
  int end = 0;

  int length() const { return end - start + 1; }
  friend bool operator==(const BoundaryRun&, const BoundaryRun&) = default;
};

/// One maximal contiguous run of 0-labels, inclusive on both ends.
struct SegmentSpan {
  int start = 0;
  int end = 0;

  int length() const { return end - start + 1; }
  friend bool operator==(const SegmentSpan&, const SegmentSpan&) = default;
};

/// Maximal runs of 1s in order; empty if the track has no 1s.
std::vector<BoundaryRun> extract_runs(const LabelTrack& track);

/// Inverse of extract_runs. Throws std::invalid_argument on out-of-range runs.
LabelTrack runs_to_track(const std::vector<BoundaryRun>& runs, int frames);

/// floor((start + end) / 2); even-length runs resolve to the earlier frame.
int run_center(const BoundaryRun& run);

/// Maximal runs of 0s in order; together with extract_runs covers every frame.
std::vector<SegmentSpan> segments_of(const LabelTrack& track);

}  // namespace cmseg
