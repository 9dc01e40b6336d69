#pragma once

#include <map>
#include <vector>

#include "cmseg/core.hpp"

namespace cmseg {

/// Integer frame-distance thresholds for the boundary metric.
inline constexpr int kBoundaryThresholds[] = {1, 2, 3, 4};

/// IoU thresholds 0.40 .. 0.75, step 0.05.
std::vector<double> segment_iou_thresholds();

struct EvalReport {
  double mf1b = 0.0;  // percentages in [0, 100]
  double mf1s = 0.0;
  std::map<int, double> per_threshold_f1b;
  std::map<double, double> per_threshold_f1s;
  int pred_boundary_count = 0;
  int gt_boundary_count = 0;
  int seeds_aggregated = 1;
};

/// Boundary F1 at one frame-distance threshold. Runs are reduced to their
/// centers and matched one-to-one, greedily by ascending center distance
/// (ties: earlier gt, then earlier pred), accepting pairs with distance
/// strictly below the threshold. Both tracks boundaryless scores 100.
double f1_boundary(const LabelTrack& pred, const LabelTrack& gt, int threshold);

/// Mean of f1_boundary over thresholds {1,2,3,4}.
double mf1b(const LabelTrack& pred, const LabelTrack& gt);

/// Segment F1 at one IoU threshold. Segments (maximal 0-runs) are matched
/// greedily by descending IoU (ties: earlier gt, then earlier pred),
/// accepting pairs with IoU strictly above the threshold.
double f1_segment(const LabelTrack& pred, const LabelTrack& gt, double iou_threshold);

/// Mean of f1_segment over IoU thresholds {0.40, 0.45, ..., 0.75}.
double mf1s(const LabelTrack& pred, const LabelTrack& gt);

/// Full report for one (pred, gt) pair.
EvalReport evaluate(const LabelTrack& pred, const LabelTrack& gt);

struct AggregateSummary {
  double mf1b_mean = 0.0;
  double mf1b_stddev = 0.0;  // population standard deviation
  double mf1s_mean = 0.0;
  double mf1s_stddev = 0.0;
  long pred_boundary_count = 0;  // summed
  long gt_boundary_count = 0;
  int reports = 0;
};

/// Mean and population stddev across reports. Throws on an empty list.
AggregateSummary aggregate(const std::vector<EvalReport>& reports);

}  // namespace cmseg
