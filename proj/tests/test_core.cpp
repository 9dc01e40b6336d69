#include <doctest.h>

#include <random>

#include "cmseg/core.hpp"
#include "oracles.hpp"

using namespace cmseg;

namespace {

LabelTrack track_of(const char* bits) {
  LabelTrack track;
  for (const char* c = bits; *c != '\0'; ++c) track.push_back(*c == '1' ? 1 : 0);
  return track;
}

}  // namespace

TEST_CASE("extract_runs reads maximal 1-runs") {
  CHECK(extract_runs(track_of("000000")).empty());
  CHECK(extract_runs(track_of("011001")) == std::vector<BoundaryRun>{{1, 2}, {5, 5}});
  CHECK(extract_runs(track_of("111")) == std::vector<BoundaryRun>{{0, 2}});
}

TEST_CASE("runs_to_track inverts extract_runs") {
  CHECK(runs_to_track({}, 4) == track_of("0000"));
  CHECK(runs_to_track({{1, 2}}, 4) == track_of("0110"));
  CHECK(runs_to_track({{0, 0}, {3, 3}}, 4) == track_of("1001"));
  CHECK_THROWS_AS(runs_to_track({{2, 4}}, 4), std::invalid_argument);
}

TEST_CASE("run_center floors the midpoint") {
  CHECK(run_center({1, 2}) == 1);
  CHECK(run_center({5, 5}) == 5);
  CHECK(run_center({9, 11}) == 10);
}

TEST_CASE("segments_of reads maximal 0-runs") {
  CHECK(segments_of(track_of("0110")) == std::vector<SegmentSpan>{{0, 0}, {3, 3}});
  CHECK(segments_of(track_of("0000")) == std::vector<SegmentSpan>{{0, 3}});
  CHECK(segments_of(track_of("1111")).empty());
}

TEST_CASE("round trip and partition properties on random tracks") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int frames = 1 + static_cast<int>(rng() % 80);
    const LabelTrack track = oracle::random_track(rng, frames);

    const auto runs = extract_runs(track);
    CHECK(runs_to_track(runs, frames) == track);

    // segments and runs jointly cover every frame exactly once
    std::vector<int> covered(static_cast<std::size_t>(frames), 0);
    for (const auto& run : runs) {
      CHECK(run_center(run) >= run.start);
      CHECK(run_center(run) <= run.end);
      for (int i = run.start; i <= run.end; ++i) ++covered[static_cast<std::size_t>(i)];
    }
    for (const auto& seg : segments_of(track)) {
      for (int i = seg.start; i <= seg.end; ++i) ++covered[static_cast<std::size_t>(i)];
    }
    for (int c : covered) CHECK(c == 1);
  }
}

TEST_CASE("feature matrix validation") {
  FeatureMatrix features;
  features.values.setConstant(3, 2, 1.0);
  CHECK_NOTHROW(validate(features));

  features.fps = 0.0;
  CHECK_THROWS_AS(validate(features), std::invalid_argument);

  features.fps = 25.0;
  features.values(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(validate(features), std::invalid_argument);

  features.values.resize(0, 0);
  CHECK_THROWS_AS(validate(features), std::invalid_argument);
}
