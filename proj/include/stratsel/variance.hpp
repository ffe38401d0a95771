#ifndef STRATSEL_VARIANCE_HPP_
#define STRATSEL_VARIANCE_HPP_

#include <cstdint>
#include <span>

#include "stratsel/allocation.hpp"
#include "stratsel/stats.hpp"

namespace stratsel {

// Sum_k (N_k / N) * stratum_means[k].
double stratified_mean(std::span<const double> stratum_means, const StratumStats& stats);

// Variance of the stratified mean with finite population correction:
// (1/N^2) (sum N_k^2 s_k^2 / n_k - sum N_k s_k^2).
double stratified_variance(const StratumStats& stats, const AllocationPlan& plan);

// Same formula with real-valued stratum sample sizes (e.g. exact
// proportional quotas). Requires 0 < n_k <= N_k.
double stratified_variance(const StratumStats& stats, std::span<const double> sizes);

// (s^2 / n)(1 - n/N).
double srs_variance(const StratumStats& stats, std::int64_t n);

// Between-stratum gap sum N_k (mu_k - mu)^2 / (n N), without the fpc factor.
// The exact difference srs_variance - stratified_variance under real-valued
// proportional allocation is (1 - n/N) * srs_gap.
double srs_gap(const StratumStats& stats, std::int64_t n);

struct TreatmentEstimate {
  double mean_treatment = 0.0;
  double mean_control = 0.0;
  double var_treatment = 0.0;
  double var_control = 0.0;
};

double t_statistic(const TreatmentEstimate& estimate);

}  // namespace stratsel

#endif  // STRATSEL_VARIANCE_HPP_
