#include "stratsel/variance.hpp"

#include <algorithm>
#include <cmath>

#include "stratsel/error.hpp"

namespace stratsel {

double stratified_mean(std::span<const double> stratum_means, const StratumStats& stats) {
  require(stratum_means.size() == stats.strata(), ErrorCode::kLengthMismatch,
          "one sample mean per stratum is required");
  const auto N = static_cast<double>(stats.population());
  double total = 0.0;
  for (std::size_t k = 0; k < stratum_means.size(); ++k)
    total += static_cast<double>(stats.sizes[k]) / N * stratum_means[k];
  return total;
}

double stratified_variance(const StratumStats& stats, std::span<const double> sizes) {
  require(sizes.size() == stats.strata(), ErrorCode::kLengthMismatch, "plan/strata mismatch");
  const auto N = static_cast<double>(stats.population());
  double sampled = 0.0;
  double correction = 0.0;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const auto nk = static_cast<double>(stats.sizes[k]);
    require(sizes[k] > 0.0, ErrorCode::kPrecondition,
            "stratum " + std::to_string(k) + " has no sample");
    require(sizes[k] <= nk, ErrorCode::kOverAllocated,
            "stratum " + std::to_string(k) + " sample exceeds its size");
    sampled += nk * nk * stats.variances[k] / sizes[k];
    correction += nk * stats.variances[k];
  }
  // Exact algebra gives >= 0; clamp rounding residue at census.
  return std::max(0.0, (sampled - correction) / (N * N));
}

double stratified_variance(const StratumStats& stats, const AllocationPlan& plan) {
  require(plan.sizes.size() == stats.strata(), ErrorCode::kLengthMismatch, "plan/strata mismatch");
  std::vector<double> sizes(plan.sizes.begin(), plan.sizes.end());
  return stratified_variance(stats, sizes);
}

double srs_variance(const StratumStats& stats, std::int64_t n) {
  const std::int64_t N = stats.population();
  require(n >= 1 && n <= N, ErrorCode::kPrecondition, "n must lie in [1, N]");
  const auto nd = static_cast<double>(n);
  return stats.overall_variance / nd * (1.0 - nd / static_cast<double>(N));
}

double srs_gap(const StratumStats& stats, std::int64_t n) {
  const std::int64_t N = stats.population();
  require(n >= 1 && n <= N, ErrorCode::kPrecondition, "n must lie in [1, N]");
  double between = 0.0;
  for (std::size_t k = 0; k < stats.strata(); ++k) {
    const double d = stats.means[k] - stats.overall_mean;
    between += static_cast<double>(stats.sizes[k]) * d * d;
  }
  return between / (static_cast<double>(n) * static_cast<double>(N));
}

double t_statistic(const TreatmentEstimate& estimate) {
  require(estimate.var_treatment >= 0.0 && estimate.var_control >= 0.0, ErrorCode::kPrecondition,
          "variances must be nonnegative");
  const double var = estimate.var_treatment + estimate.var_control;
  require(var > 0.0, ErrorCode::kZeroVariance, "t-statistic needs positive variance");
  return (estimate.mean_treatment - estimate.mean_control) / std::sqrt(var);
}

}  // namespace stratsel
