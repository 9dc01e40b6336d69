#include "cmseg/core.hpp"

#include <stdexcept>

namespace cmseg {

void validate(const FeatureMatrix& features) {
  if (features.frames() < 1 || features.dims() < 1) {
    throw std::invalid_argument("feature matrix must have at least one frame and one dimension");
  }
  if (!features.values.allFinite()) {
    throw std::invalid_argument("feature matrix contains non-finite values");
  }
  if (!(features.fps > 0.0)) {
    throw std::invalid_argument("fps must be positive");
  }
}

std::vector<BoundaryRun> extract_runs(const LabelTrack& track) {
  std::vector<BoundaryRun> runs;
  const int n = static_cast<int>(track.size());
  int i = 0;
  while (i < n) {
    if (track[i] != 0) {
      int j = i;
      while (j + 1 < n && track[j + 1] != 0) ++j;
      runs.push_back({i, j});
      i = j + 1;
    } else {
      ++i;
    }
  }
  return runs;
}

LabelTrack runs_to_track(const std::vector<BoundaryRun>& runs, int frames) {
  LabelTrack track(static_cast<std::size_t>(frames), 0);
  for (const auto& run : runs) {
    if (run.start < 0 || run.end < run.start || run.end >= frames) {
      throw std::invalid_argument("boundary run out of range");
    }
    for (int i = run.start; i <= run.end; ++i) track[static_cast<std::size_t>(i)] = 1;
  }
  return track;
}

int run_center(const BoundaryRun& run) { return (run.start + run.end) / 2; }

std::vector<SegmentSpan> segments_of(const LabelTrack& track) {
  std::vector<SegmentSpan> segments;
  const int n = static_cast<int>(track.size());
  int i = 0;
  while (i < n) {
    if (track[i] == 0) {
      int j = i;
      while (j + 1 < n && track[j + 1] == 0) ++j;
      segments.push_back({i, j});
      i = j + 1;
    } else {
      ++i;
    }
  }
  return segments;
}

}  // namespace cmseg
