#ifndef STRATSEL_BASELINES_HPP_
#define STRATSEL_BASELINES_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stratsel/frame.hpp"
#include "stratsel/rng.hpp"

namespace stratsel {

// Pearson correlation with population moments; 0 when either side is
// constant.
double pearson_correlation(std::span<const double> x, std::span<const double> y);

// argmax_j |corr(X_j, Y)|, ties to the lowest index.
std::size_t pick_covariate(const PopulationFrame& frame);

struct CupedModel {
  std::size_t covariate_index = 0;
  double theta = 0.0;
  double covariate_population_mean = 0.0;
};

// theta = cov(X_j, Y) / var(X_j) on `train`. The covariate mean is taken
// from `train`; call with_population_mean to bind an evaluation population.
CupedModel cuped_fit(const PopulationFrame& train, std::size_t covariate_index);
CupedModel with_population_mean(CupedModel model, const PopulationFrame& population);

double cuped_adjusted_mean(double sample_outcome_mean, double sample_covariate_mean,
                           const CupedModel& model);

// Covariate-ordered systematic sampler. Units are sorted by the covariate
// (stable in row order); a draw picks sorted positions
// floor((i + offset) * N / n) for i in [0, n).
class CossSampler {
 public:
  CossSampler(const PopulationFrame& frame, std::size_t covariate_index);

  std::size_t population() const { return sorted_outcome_.size(); }
  double mean_at_offset(std::int64_t n, double offset) const;
  double draw(std::int64_t n, Rng& rng) const;

 private:
  std::vector<double> sorted_outcome_;
};

double coss_mean(const PopulationFrame& frame, std::size_t covariate_index, std::int64_t n, Rng& rng);

// Outcome mean of a uniform without-replacement sample.
double srs_mean(const PopulationFrame& frame, std::int64_t n, Rng& rng);

}  // namespace stratsel

#endif  // STRATSEL_BASELINES_HPP_
