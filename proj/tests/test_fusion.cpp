#include <doctest.h>

#include <algorithm>
#include <random>

#include "cmseg/fusion.hpp"
#include "oracles.hpp"

using namespace cmseg;

namespace {

LabelTrack track_of(const char* bits) {
  LabelTrack track;
  for (const char* c = bits; *c != '\0'; ++c) track.push_back(*c == '1' ? 1 : 0);
  return track;
}

std::vector<int> run_lengths(const LabelTrack& track) {
  std::vector<int> lengths;
  for (const auto& run : extract_runs(track)) lengths.push_back(run.length());
  std::sort(lengths.begin(), lengths.end());
  return lengths;
}

}  // namespace

TEST_CASE("threshold_probs uses a strict cutoff") {
  CHECK(threshold_probs({0.9, 0.1}, 0.5) == track_of("10"));
  CHECK(threshold_probs({0.5, 0.5}, 0.5) == track_of("00"));
  CHECK(threshold_probs({0.45, 0.2}, 0.4) == track_of("10"));
}

TEST_CASE("insertion examples") {
  const LabelTrack zeros(16, 0);
  const LabelTrack cp = runs_to_track({{2, 4}, {10, 12}}, 16);

  CHECK(insertion(zeros, cp, 4) == cp);

  const LabelTrack pl = runs_to_track({{9, 11}}, 16);
  CHECK(insertion(pl, zeros, 4) == pl);

  // cp run at 2-4 inserted, cp run at 10-12 suppressed where pl 1s are near
  const auto fused = insertion(pl, cp, 4);
  CHECK(extract_runs(fused) == std::vector<BoundaryRun>{{2, 4}, {9, 11}});
  CHECK(fused == oracle::naive_insertion(pl, cp, 4));

  CHECK_THROWS_AS(insertion(pl, LabelTrack(8, 0), 4), std::invalid_argument);
}

TEST_CASE("insertion equals the naive per-frame rule and never deletes") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const int frames = 5 + static_cast<int>(rng() % 90);
    const int gamma = 1 + static_cast<int>(rng() % 8);
    const auto pl = oracle::random_track(rng, frames);
    const auto cp = oracle::random_track(rng, frames);
    const auto fused = insertion(pl, cp, gamma);
    CHECK(fused == oracle::naive_insertion(pl, cp, gamma));
    for (std::size_t i = 0; i < pl.size(); ++i) {
      if (pl[i]) CHECK(fused[i] == 1);
    }
  }
}

TEST_CASE("refinement examples") {
  const int frames = 30;
  const LabelTrack pl = runs_to_track({{10, 12}}, frames);
  const LabelTrack zeros(frames, 0);

  CHECK(refinement(pl, zeros, 4) == pl);

  // center 11 matched to center 15: midpoint 13, run moves to (12,14)
  const LabelTrack cp_near = runs_to_track({{14, 16}}, frames);
  CHECK(extract_runs(refinement(pl, cp_near, 4)) == std::vector<BoundaryRun>{{12, 14}});

  // distance 9 > delta: unchanged
  const LabelTrack cp_far = runs_to_track({{20, 22}}, frames);
  CHECK(refinement(pl, cp_far, 4) == pl);
}

TEST_CASE("refinement preserves run count, lengths and bounded center shift") {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 300; ++trial) {
    const int frames = 8 + static_cast<int>(rng() % 100);
    const int delta = static_cast<int>(rng() % 9);
    const auto pl = oracle::random_track(rng, frames);
    const auto cp = oracle::random_track(rng, frames);
    const auto refined = refinement(pl, cp, delta);

    const auto before = extract_runs(pl);
    const auto after = extract_runs(refined);
    REQUIRE(before.size() == after.size());
    CHECK(run_lengths(pl) == run_lengths(refined));
    const int max_shift = (delta + 1) / 2;
    for (std::size_t i = 0; i < before.size(); ++i) {
      CHECK(std::abs(run_center(after[i]) - run_center(before[i])) <= max_shift);
    }
  }
}

TEST_CASE("cmpl identities") {
  FusionConfig config;
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const int frames = 8 + static_cast<int>(rng() % 60);
    const LabelTrack zeros(static_cast<std::size_t>(frames), 0);
    const auto pl = oracle::random_track(rng, frames);
    const auto cp = oracle::random_track(rng, frames);
    CHECK(cmpl(pl, zeros, config) == pl);
    CHECK(cmpl(zeros, cp, config) == cp);
  }
}

TEST_CASE("cmpl mitigates under-segmentation by inserting distant cp runs") {
  // one pl run plus a distant cp run: the output keeps both
  const int frames = 40;
  const LabelTrack pl = runs_to_track({{5, 7}}, frames);
  const LabelTrack cp = runs_to_track({{6, 8}, {25, 27}}, frames);
  FusionConfig config;
  const auto fused = cmpl(pl, cp, config);
  const auto runs = extract_runs(fused);
  REQUIRE(runs.size() == 2);
  CHECK(runs[1] == BoundaryRun{25, 27});
}

TEST_CASE("merge_union examples and algebra") {
  CHECK(merge_union(track_of("0110"), track_of("0000")) == track_of("0110"));
  CHECK(merge_union(track_of("0110"), track_of("1001")) == track_of("1111"));
  CHECK(merge_union(track_of("0000"), track_of("0000")) == track_of("0000"));

  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 50; ++trial) {
    const int frames = 4 + static_cast<int>(rng() % 40);
    const auto a = oracle::random_track(rng, frames);
    const auto b = oracle::random_track(rng, frames);
    const auto c = oracle::random_track(rng, frames);
    CHECK(merge_union(a, b) == merge_union(b, a));
    CHECK(merge_union(a, a) == a);
    CHECK(merge_union(merge_union(a, b), c) == merge_union(a, merge_union(b, c)));
  }
}

TEST_CASE("local_fusion fills only above-average pl segments") {
  // equal-length segments: nothing strictly exceeds the mean
  const LabelTrack pl_even = runs_to_track({{3, 4}, {8, 9}}, 13);
  const LabelTrack cp_any = runs_to_track({{0, 1}, {11, 12}}, 13);
  CHECK(local_fusion(pl_even, cp_any) == pl_even);

  // segments of lengths 2 and 10: cp run inside the long one is inserted
  const LabelTrack pl = runs_to_track({{2, 3}}, 14);  // segments (0,1) and (4,13)
  const LabelTrack cp = runs_to_track({{8, 9}}, 14);
  const auto fused = local_fusion(pl, cp);
  CHECK(extract_runs(fused) == std::vector<BoundaryRun>{{2, 3}, {8, 9}});

  CHECK(local_fusion(pl, LabelTrack(14, 0)) == pl);
}

TEST_CASE("local_fusion output is contained in the union") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    const int frames = 6 + static_cast<int>(rng() % 60);
    const auto pl = oracle::random_track(rng, frames);
    const auto cp = oracle::random_track(rng, frames);
    const auto fused = local_fusion(pl, cp);
    for (std::size_t i = 0; i < fused.size(); ++i) {
      if (fused[i]) CHECK((pl[i] || cp[i]));
      if (pl[i]) CHECK(fused[i] == 1);
    }
  }
}

TEST_CASE("strategy names round-trip") {
  for (auto strategy : {FusionStrategy::cmpl, FusionStrategy::insertion_only,
                        FusionStrategy::refinement_only, FusionStrategy::merge,
                        FusionStrategy::local}) {
    CHECK(fusion_strategy_from_string(to_string(strategy)) == strategy);
  }
  CHECK_THROWS_AS(fusion_strategy_from_string("bogus"), std::invalid_argument);
}
