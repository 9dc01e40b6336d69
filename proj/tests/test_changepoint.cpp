#include <doctest.h>

#include <random>

#include "cmseg/changepoint.hpp"
#include "oracles.hpp"

using namespace cmseg;

namespace {

FeatureMatrix matrix_1d(const std::vector<double>& values) {
  FeatureMatrix features;
  features.values.resize(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t i = 0; i < values.size(); ++i) features.values(static_cast<Eigen::Index>(i), 0) = values[i];
  return features;
}

FeatureMatrix step_signal(int left, int right, double low, double high) {
  std::vector<double> values(static_cast<std::size_t>(left), low);
  values.insert(values.end(), static_cast<std::size_t>(right), high);
  return matrix_1d(values);
}

}  // namespace

TEST_CASE("l2_cost examples") {
  const auto features = matrix_1d({0, 0, 6, 6});
  const CostCache cache(features);
  CHECK(cache.l2_cost(0, 4) == doctest::Approx(36.0));
  CHECK(cache.l2_cost(0, 2) == doctest::Approx(0.0));
  CHECK(cache.l2_cost(2, 4) == doctest::Approx(0.0));
  CHECK_THROWS_AS(cache.l2_cost(2, 2), std::invalid_argument);
  CHECK_THROWS_AS(cache.l2_cost(3, 1), std::invalid_argument);

  const CostCache constant(matrix_1d({4, 4, 4, 4, 4}));
  for (int t = 1; t <= 5; ++t) CHECK(constant.l2_cost(0, t) == doctest::Approx(0.0));
}

TEST_CASE("cached cost matches direct summation") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int frames = 20 + static_cast<int>(rng() % 100);
    const int dims = 1 + static_cast<int>(rng() % 6);
    FeatureMatrix features;
    features.values = oracle::random_piecewise_signal(rng, frames, dims);
    const CostCache cache(features);
    for (int check = 0; check < 25; ++check) {
      const int s = static_cast<int>(rng() % static_cast<unsigned>(frames));
      const int t = s + 1 + static_cast<int>(rng() % static_cast<unsigned>(frames - s));
      const double direct = oracle::direct_l2(features.values, s, t);
      CHECK(cache.l2_cost(s, t) == doctest::Approx(direct).epsilon(1e-9));
    }
  }
}

TEST_CASE("l2 cost is subadditive") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    FeatureMatrix features;
    features.values = oracle::random_piecewise_signal(rng, 60, 3);
    const CostCache cache(features);
    for (int check = 0; check < 50; ++check) {
      const int s = static_cast<int>(rng() % 58);
      const int u = s + 2 + static_cast<int>(rng() % static_cast<unsigned>(60 - s - 2));
      const int t = s + 1 + static_cast<int>(rng() % static_cast<unsigned>(u - s - 1));
      CHECK(cache.l2_cost(s, u) >= cache.l2_cost(s, t) + cache.l2_cost(t, u) - 1e-9);
    }
  }
}

TEST_CASE("pelt examples") {
  const auto constant = matrix_1d(std::vector<double>(30, 2.5));
  CHECK(pelt(constant, 1.0).changepoints.empty());

  const auto step = step_signal(10, 10, 0.0, 5.0);
  const auto result = pelt(step, 10.0, 2);
  CHECK(result.changepoints == std::vector<int>{10});
  CHECK(result.objective == doctest::Approx(10.0));  // zero cost + one penalty

  // no-split objective for the same signal is the full-segment cost
  const CostCache cache(step);
  CHECK(cache.l2_cost(0, 20) == doctest::Approx(125.0));

  FeatureMatrix empty;
  CHECK_THROWS_AS(pelt(empty, 1.0), std::invalid_argument);
}

TEST_CASE("pelt matches the unpruned dynamic program") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> penalty_dist(1.0, 200.0);
  for (int trial = 0; trial < 25; ++trial) {
    FeatureMatrix features;
    features.values = oracle::random_piecewise_signal(rng, 40 + static_cast<int>(rng() % 80),
                                                      1 + static_cast<int>(rng() % 5));
    const double penalty = penalty_dist(rng);
    const auto fast = pelt(features, penalty);
    const auto slow = brute_force_dp(features, penalty);
    CHECK(fast.objective == doctest::Approx(slow.objective).epsilon(1e-9));
    CHECK(fast.changepoints == slow.changepoints);
  }
}

TEST_CASE("pelt changepoint count is nonincreasing in penalty") {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 10; ++trial) {
    FeatureMatrix features;
    features.values = oracle::random_piecewise_signal(rng, 120, 3);
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (double penalty : {0.5, 2.0, 8.0, 32.0, 128.0, 512.0}) {
      const std::size_t count = pelt(features, penalty).changepoints.size();
      CHECK(count <= prev);
      prev = count;
    }
  }
}

TEST_CASE("dynp examples") {
  const auto step = step_signal(10, 10, 0.0, 5.0);
  const auto k0 = dynp(step, 0);
  CHECK(k0.changepoints.empty());
  CHECK(k0.objective == doctest::Approx(CostCache(step).l2_cost(0, 20)));

  CHECK(dynp(step, 1).changepoints == std::vector<int>{10});

  std::vector<double> tri(8, 0.0);
  tri.insert(tri.end(), 8, 5.0);
  tri.insert(tri.end(), 8, 0.0);
  CHECK(dynp(matrix_1d(tri), 2).changepoints == std::vector<int>{8, 16});

  CHECK_THROWS_AS(dynp(step, 15, 2), std::invalid_argument);
}

TEST_CASE("dynp matches exhaustive enumeration and is monotone in K") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 15; ++trial) {
    FeatureMatrix features;
    features.values = oracle::random_piecewise_signal(rng, 15 + static_cast<int>(rng() % 20), 2);
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 3; ++k) {
      const auto result = dynp(features, k);
      const auto [best, cps] = oracle::enumerate_dynp(features.values, k, 2);
      CHECK(result.objective == doctest::Approx(best).epsilon(1e-9));
      CHECK(result.objective <= prev + 1e-9);
      prev = result.objective;
    }
  }
}

TEST_CASE("changepoints_to_track expansion") {
  ChangepointResult result;
  CHECK(changepoints_to_track(result, 6) == LabelTrack{0, 0, 0, 0, 0, 0});

  result.changepoints = {3};
  CHECK(changepoints_to_track(result, 6, 3) == LabelTrack{0, 1, 1, 1, 0, 0});

  result.changepoints = {1};
  CHECK(changepoints_to_track(result, 6, 3) == LabelTrack{1, 1, 0, 0, 0, 0});

  result.changepoints = {3, 5};  // overlapping expansions merge into one run
  const auto track = changepoints_to_track(result, 10, 3);
  CHECK(extract_runs(track) == std::vector<BoundaryRun>{{1, 5}});

  CHECK_THROWS_AS(changepoints_to_track(result, 10, 2), std::invalid_argument);
}

TEST_CASE("standardized centers and scales each dimension") {
  std::mt19937_64 rng(29);
  FeatureMatrix features;
  features.values = oracle::random_piecewise_signal(rng, 50, 3);
  const auto scaled = standardized(features);
  for (int d = 0; d < 3; ++d) {
    CHECK(scaled.values.col(d).mean() == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(scaled.values.col(d).squaredNorm() / 50.0 == doctest::Approx(1.0).epsilon(1e-9));
  }
}
