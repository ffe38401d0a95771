#include <algorithm>
#include <cmath>

#include "gtest/gtest.h"
#include "stratsel/error.hpp"
#include "stratsel/rng.hpp"
#include "stratsel/variance.hpp"
#include "test_util.hpp"

namespace stratsel {
namespace {

using testing::near_rel;

StratumStats random_stats(Rng& rng, std::size_t max_k, std::int64_t max_size) {
  const std::size_t K = 1 + uniform_below(rng, max_k);
  std::vector<std::int64_t> sizes(K);
  std::vector<double> means(K);
  std::vector<double> variances(K);
  for (std::size_t k = 0; k < K; ++k) {
    sizes[k] = 2 + static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(max_size)));
    means[k] = (uniform_unit(rng) - 0.5) * 20.0;
    variances[k] = uniform_unit(rng) * 5.0;
  }
  return StratumStats::from_moments(sizes, means, variances);
}

TEST(StratifiedMeanTest, Examples) {
  const auto stats = StratumStats::from_moments({60, 40}, {0, 0}, {1, 1});
  EXPECT_DOUBLE_EQ(stratified_mean(std::vector<double>{10, 20}, stats), 14.0);
  EXPECT_DOUBLE_EQ(stratified_mean(std::vector<double>{3.5, 3.5}, stats), 3.5);
  const auto single = StratumStats::from_moments({17}, {0}, {1});
  EXPECT_DOUBLE_EQ(stratified_mean(std::vector<double>{-2.25}, single), -2.25);
  EXPECT_THROW(stratified_mean(std::vector<double>{1}, stats), Error);
}

TEST(StratifiedVarianceTest, Examples) {
  const auto one = StratumStats::from_moments({100}, {0}, {4});
  const AllocationPlan plan{{25}, 25, AllocationMethod::kManual};
  // (1/10000)(10000*4/25 - 400)
  EXPECT_NEAR(stratified_variance(one, plan), 0.12, 1e-15);

  const auto two = StratumStats::from_moments({30, 70}, {1, 2}, {3, 5});
  EXPECT_EQ(stratified_variance(two, AllocationPlan{{30, 70}, 100, AllocationMethod::kManual}), 0.0);
  const auto flat = StratumStats::from_moments({30, 70}, {1, 2}, {0, 0});
  EXPECT_EQ(stratified_variance(flat, AllocationPlan{{3, 7}, 10, AllocationMethod::kManual}), 0.0);
}

TEST(StratifiedVarianceTest, Errors) {
  const auto two = StratumStats::from_moments({30, 70}, {1, 2}, {3, 5});
  try {
    stratified_variance(two, AllocationPlan{{31, 7}, 38, AllocationMethod::kManual});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOverAllocated);
  }
  try {
    stratified_variance(two, AllocationPlan{{3}, 3, AllocationMethod::kManual});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kLengthMismatch);
  }
}

TEST(SrsVarianceTest, Examples) {
  const auto one = StratumStats::from_moments({100}, {0}, {4});
  EXPECT_NEAR(srs_variance(one, 25), 0.12, 1e-15);
  EXPECT_EQ(srs_variance(one, 100), 0.0);
  EXPECT_DOUBLE_EQ(srs_variance(one, 1), 4.0 * (1 - 1.0 / 100));
}

TEST(SrsGapTest, Examples) {
  const auto two = StratumStats::from_moments({50, 50}, {0, 2}, {1, 1});
  EXPECT_DOUBLE_EQ(srs_gap(two, 10), 0.1);
  const auto equal = StratumStats::from_moments({20, 80}, {3, 3}, {1, 2});
  EXPECT_EQ(srs_gap(equal, 10), 0.0);
  const auto single = StratumStats::from_moments({20}, {3}, {1});
  EXPECT_EQ(srs_gap(single, 5), 0.0);
}

TEST(TStatisticTest, Examples) {
  EXPECT_EQ(t_statistic({2.0, 2.0, 0.3, 0.1}), 0.0);
  EXPECT_DOUBLE_EQ(t_statistic({1.0, 0.0, 0.5, 0.5}), 1.0);
  const double t = t_statistic({3.0, 1.0, 0.2, 0.7});
  EXPECT_NEAR(t_statistic({3.0, 1.0, 0.4, 1.4}), t / std::sqrt(2.0), 1e-14);
  try {
    t_statistic({1.0, 0.0, 0.0, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroVariance);
  }
}

TEST(VarianceIdentityTest, SingleStratumEqualsSrs) {
  Rng rng = make_rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto N = 2 + static_cast<std::int64_t>(uniform_below(rng, 100000));
    const auto n = 1 + static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(N)));
    const double var = uniform_unit(rng) * 100.0;
    const auto stats = StratumStats::from_moments({N}, {0.0}, {var});
    const double a = stratified_variance(stats, AllocationPlan{{n}, n, AllocationMethod::kManual});
    const double b = srs_variance(stats, n);
    EXPECT_TRUE(near_rel(a, b, 1e-12) || (a == 0.0 && std::abs(b) < 1e-15));
  }
}

TEST(VarianceIdentityTest, ExactGapUnderRealProportionalAllocation) {
  Rng rng = make_rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto stats = random_stats(rng, 8, 5000);
    const std::int64_t N = stats.population();
    const auto n = 1 + static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(N - 1)));
    std::vector<double> quotas;
    for (auto s : stats.sizes) quotas.push_back(static_cast<double>(s) * n / N);
    const double diff = srs_variance(stats, n) - stratified_variance(stats, quotas);
    const double fpc = 1.0 - static_cast<double>(n) / N;
    const double expected = fpc * srs_gap(stats, n);
    EXPECT_LE(std::abs(diff - expected), 1e-9 * std::max(std::abs(expected), srs_variance(stats, n)))
        << diff << " vs " << expected;
  }
}

TEST(VarianceIdentityTest, NonNegativeMonotoneAndOptimalBeatsProportional) {
  Rng rng = make_rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto stats = random_stats(rng, 6, 300);
    const std::int64_t N = stats.population();
    const auto K = static_cast<std::int64_t>(stats.strata());
    const auto n = K + static_cast<std::int64_t>(uniform_below(rng, static_cast<std::uint64_t>(N - K + 1)));
    const auto prop = proportional(stats, n);
    const auto opt = optimal(stats, n);
    const double vp = stratified_variance(stats, prop);
    const double vo = stratified_variance(stats, opt);
    EXPECT_GE(vp, 0.0);
    EXPECT_GE(vo, 0.0);
    EXPECT_LE(vo, vp * (1 + 1e-12) + 1e-18);

    auto bigger = prop;
    for (std::size_t k = 0; k < stats.strata(); ++k) {
      if (bigger.sizes[k] >= stats.sizes[k]) continue;
      const double before = stratified_variance(stats, bigger);
      ++bigger.sizes[k];
      ++bigger.total;
      EXPECT_LE(stratified_variance(stats, bigger), before * (1 + 1e-12) + 1e-18);
    }
  }
}

}  // namespace
}  // namespace stratsel
