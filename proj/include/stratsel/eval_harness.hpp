#ifndef STRATSEL_EVAL_HARNESS_HPP_
#define STRATSEL_EVAL_HARNESS_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stratsel/allocation.hpp"
#include "stratsel/frame.hpp"
#include "stratsel/kmeans.hpp"
#include "stratsel/rng.hpp"
#include "stratsel/stats.hpp"

namespace stratsel {

// One sample-mean realization per call. Must be safe to call concurrently.
using Sampler = std::function<double(Rng&)>;

// Realization i uses the stream derive_seed(seed, {i}), so results do not
// depend on the worker count.
std::vector<double> draw_realizations(const Sampler& sampler, std::size_t replications,
                                      std::uint64_t seed, unsigned threads = 1);

// Population-convention variance of `replications` realizations.
double estimate_sampling_variance(const Sampler& sampler, std::size_t replications,
                                  std::uint64_t seed, unsigned threads = 1);

// (1 - var_method / var_srs) * 100.
double variance_reduction_rate(double var_method, double var_srs);

// Re-expresses a plan made on training strata over the test strata. Units
// planned for strata that are empty on test, or beyond a test stratum's
// size, are redistributed over the remaining capacity by largest remainder;
// strata left without units receive one from the largest allocation.
AllocationPlan align_plan(const AllocationPlan& plan, const StratumStats& plan_strata,
                          const StratumStats& target_strata);

// Draws plan.sizes[k] units without replacement from each stratum and
// returns the stratified mean with the frame's own stratum weights. The plan
// is indexed by the compact strata of stratum_stats(frame, labels).
class StratifiedSampler {
 public:
  StratifiedSampler(const PopulationFrame& frame, std::span<const Label> labels,
                    const AllocationPlan& plan);

  const StratumStats& stats() const { return stats_; }
  const AllocationPlan& plan() const { return plan_; }
  double draw(Rng& rng) const;
  // Closed-form variance of draw() (stratified variance with fpc).
  double analytic_variance() const;

 private:
  StratumStats stats_;
  AllocationPlan plan_;
  std::vector<std::vector<double>> stratum_outcomes_;
};

double stratified_sample_mean(const PopulationFrame& test, const StratumPartition& partition,
                              const AllocationPlan& plan, Rng& rng);

enum class Method { kSrs, kCuped, kCoss, kKMeans, kSfsKm, kSfsKmV };

std::string_view method_name(Method method);
Method parse_method(std::string_view name);  // throws BadConfig
bool is_stratified(Method method);

struct ExperimentSpec {
  std::vector<Method> methods;
  std::vector<AllocationMethod> allocators = {AllocationMethod::kProportional};
  int k = 6;
  std::size_t theta = 5;
  std::int64_t n = 1000;
  std::size_t replications = 10000;
  std::uint64_t seed = 0;
  KMeansOptions kmeans;
  unsigned threads = 1;
  std::string dataset;
};

struct MethodResult {
  Method method = Method::kSrs;
  std::optional<AllocationMethod> allocator;  // stratified methods only
  double variance = 0.0;
  double variance_reduction_percent = 0.0;
  // Closed-form stratified variance on the test strata; stratified only.
  std::optional<double> analytic_variance;
  std::vector<std::size_t> features;  // stratification variables or covariate
  std::vector<std::int64_t> plan;     // test-strata allocation; stratified only
};

struct EvaluationReport {
  std::vector<MethodResult> methods;
  double srs_variance = 0.0;
  std::size_t replications = 0;
  std::int64_t n = 0;
  std::uint64_t seed = 0;
  int k = 0;
  std::size_t theta = 0;
  std::size_t p = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::string dataset;
  std::vector<std::string> covariate_names;
};

// Fits every method on `train`, estimates its sampling variance on `test`
// and reports reduction rates against simple random sampling.
EvaluationReport run_experiment(const PopulationFrame& train, const PopulationFrame& test,
                                const ExperimentSpec& spec);

}  // namespace stratsel

#endif  // STRATSEL_EVAL_HARNESS_HPP_
