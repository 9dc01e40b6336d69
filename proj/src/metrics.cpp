#include "cmseg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <tuple>

namespace cmseg {

namespace {

void check_lengths(const LabelTrack& pred, const LabelTrack& gt) {
  if (pred.size() != gt.size()) throw std::invalid_argument("track length mismatch");
}

double f1_from_counts(int tp, int fp, int fn) {
  if (tp + fp + fn == 0) return 100.0;  // perfect agreement on empty sets
  return 200.0 * tp / static_cast<double>(2 * tp + fp + fn);
}

double iou(const SegmentSpan& a, const SegmentSpan& b) {
  const int inter = std::min(a.end, b.end) - std::max(a.start, b.start) + 1;
  if (inter <= 0) return 0.0;
  const int uni = std::max(a.end, b.end) - std::min(a.start, b.start) + 1;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace

std::vector<double> segment_iou_thresholds() {
  std::vector<double> thresholds;
  for (int i = 8; i <= 15; ++i) thresholds.push_back(i * 0.05);
  return thresholds;
}

double f1_boundary(const LabelTrack& pred, const LabelTrack& gt, int threshold) {
  check_lengths(pred, gt);
  if (threshold < 1) throw std::invalid_argument("boundary threshold must be >= 1");

  std::vector<int> pred_centers, gt_centers;
  for (const auto& run : extract_runs(pred)) pred_centers.push_back(run_center(run));
  for (const auto& run : extract_runs(gt)) gt_centers.push_back(run_center(run));

  struct Pair {
    int dist;
    std::size_t gt_idx;
    std::size_t pred_idx;
  };
  std::vector<Pair> pairs;
  for (std::size_t g = 0; g < gt_centers.size(); ++g) {
    for (std::size_t p = 0; p < pred_centers.size(); ++p) {
      const int dist = std::abs(pred_centers[p] - gt_centers[g]);
      if (dist < threshold) pairs.push_back({dist, g, p});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    return std::tie(a.dist, a.gt_idx, a.pred_idx) < std::tie(b.dist, b.gt_idx, b.pred_idx);
  });

  std::vector<bool> gt_used(gt_centers.size(), false), pred_used(pred_centers.size(), false);
  int tp = 0;
  for (const auto& pair : pairs) {
    if (gt_used[pair.gt_idx] || pred_used[pair.pred_idx]) continue;
    gt_used[pair.gt_idx] = true;
    pred_used[pair.pred_idx] = true;
    ++tp;
  }
  const int fp = static_cast<int>(pred_centers.size()) - tp;
  const int fn = static_cast<int>(gt_centers.size()) - tp;
  return f1_from_counts(tp, fp, fn);
}

double mf1b(const LabelTrack& pred, const LabelTrack& gt) {
  double sum = 0.0;
  for (int threshold : kBoundaryThresholds) sum += f1_boundary(pred, gt, threshold);
  return sum / std::size(kBoundaryThresholds);
}

double f1_segment(const LabelTrack& pred, const LabelTrack& gt, double iou_threshold) {
  check_lengths(pred, gt);
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw std::invalid_argument("iou threshold must be in (0,1)");
  }

  const auto pred_segments = segments_of(pred);
  const auto gt_segments = segments_of(gt);

  struct Pair {
    double overlap;
    std::size_t gt_idx;
    std::size_t pred_idx;
  };
  std::vector<Pair> pairs;
  for (std::size_t g = 0; g < gt_segments.size(); ++g) {
    for (std::size_t p = 0; p < pred_segments.size(); ++p) {
      const double overlap = iou(pred_segments[p], gt_segments[g]);
      if (overlap > iou_threshold) pairs.push_back({overlap, g, p});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    return std::tie(a.gt_idx, a.pred_idx) < std::tie(b.gt_idx, b.pred_idx);
  });

  std::vector<bool> gt_used(gt_segments.size(), false), pred_used(pred_segments.size(), false);
  int tp = 0;
  for (const auto& pair : pairs) {
    if (gt_used[pair.gt_idx] || pred_used[pair.pred_idx]) continue;
    gt_used[pair.gt_idx] = true;
    pred_used[pair.pred_idx] = true;
    ++tp;
  }
  const int fp = static_cast<int>(pred_segments.size()) - tp;
  const int fn = static_cast<int>(gt_segments.size()) - tp;
  return f1_from_counts(tp, fp, fn);
}

double mf1s(const LabelTrack& pred, const LabelTrack& gt) {
  const auto thresholds = segment_iou_thresholds();
  double sum = 0.0;
  for (double threshold : thresholds) sum += f1_segment(pred, gt, threshold);
  return sum / static_cast<double>(thresholds.size());
}

EvalReport evaluate(const LabelTrack& pred, const LabelTrack& gt) {
  EvalReport report;
  for (int threshold : kBoundaryThresholds) {
    report.per_threshold_f1b[threshold] = f1_boundary(pred, gt, threshold);
  }
  for (double threshold : segment_iou_thresholds()) {
    report.per_threshold_f1s[threshold] = f1_segment(pred, gt, threshold);
  }
  report.mf1b = mf1b(pred, gt);
  report.mf1s = mf1s(pred, gt);
  report.pred_boundary_count = static_cast<int>(extract_runs(pred).size());
  report.gt_boundary_count = static_cast<int>(extract_runs(gt).size());
  return report;
}

AggregateSummary aggregate(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("cannot aggregate an empty report list");
  AggregateSummary summary;
  summary.reports = static_cast<int>(reports.size());
  for (const auto& report : reports) {
    summary.mf1b_mean += report.mf1b;
    summary.mf1s_mean += report.mf1s;
    summary.pred_boundary_count += report.pred_boundary_count;
    summary.gt_boundary_count += report.gt_boundary_count;
  }
  const double n = static_cast<double>(reports.size());
  summary.mf1b_mean /= n;
  summary.mf1s_mean /= n;
  double var_b = 0.0, var_s = 0.0;
  for (const auto& report : reports) {
    var_b += (report.mf1b - summary.mf1b_mean) * (report.mf1b - summary.mf1b_mean);
    var_s += (report.mf1s - summary.mf1s_mean) * (report.mf1s - summary.mf1s_mean);
  }
  summary.mf1b_stddev = std::sqrt(var_b / n);
  summary.mf1s_stddev = std::sqrt(var_s / n);
  return summary;
}

}  // namespace cmseg
