#ifndef STRATSEL_STATS_HPP_
#define STRATSEL_STATS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stratsel/frame.hpp"

namespace stratsel {

using Label = std::int32_t;

// Per-stratum outcome moments (population convention, divide by N_k).
// Strata are compact: stratum k corresponds to original label labels[k], and
// every stratum has at least one member.
struct StratumStats {
  std::vector<std::int64_t> sizes;
  std::vector<double> means;
  std::vector<double> variances;
  double overall_mean = 0.0;
  double overall_variance = 0.0;
  std::vector<Label> labels;

  std::size_t strata() const { return sizes.size(); }
  std::int64_t population() const;

  // Builds stats from per-stratum moments; the overall mean and variance
  // follow from the law of total variance. Labels default to 0..K-1.
  static StratumStats from_moments(std::vector<std::int64_t> sizes, std::vector<double> means,
                                   std::vector<double> variances);

  // Compact stratum index of an original label, or -1 when the label has no
  // members.
  int index_of(Label label) const;
};

StratumStats stratum_stats(std::span<const double> outcome, std::span<const Label> labels);
StratumStats stratum_stats(const PopulationFrame& frame, std::span<const Label> labels);

// Rewrites original labels into compact stratum indices of stats.
std::vector<Label> compact_labels(const StratumStats& stats, std::span<const Label> labels);

double mean_of(std::span<const double> values);
// Population variance (divide by N), two-pass.
double population_variance(std::span<const double> values);

}  // namespace stratsel

#endif  // STRATSEL_STATS_HPP_
