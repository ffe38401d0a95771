#include "stratsel/subset_search.hpp"

#include <algorithm>
#include <limits>

#include "stratsel/error.hpp"
#include "stratsel/parallel.hpp"
#include "stratsel/stats.hpp"
#include "stratsel/variance.hpp"

namespace stratsel {

std::uint64_t candidate_seed(std::uint64_t master, std::size_t step, std::size_t feature) {
  return derive_seed(master, {0x5f5ULL, step, feature});
}

double stratification_variance(const PopulationFrame& frame, const StratumPartition& partition,
                               std::int64_t n, AllocationMethod allocator) {
  const StratumStats stats = stratum_stats(frame, partition.train_labels);
  const AllocationPlan plan = allocate(stats, n, allocator);
  return stratified_variance(stats, plan);
}

namespace {

SelectionResult forward_search(const PopulationFrame& frame, const SearchConfig& config,
                               SearchMetric metric) {
  const std::size_t p = frame.cols();
  require(config.theta <= p, ErrorCode::kThetaExceedsP,
          "theta=" + std::to_string(config.theta) + " exceeds p=" + std::to_string(p));
  require(config.k >= 1 && static_cast<std::size_t>(config.k) <= frame.rows(),
          ErrorCode::kKExceedsPopulation, "K must lie in [1, N]");
  if (metric == SearchMetric::kVariance) {
    require(config.n >= config.k, ErrorCode::kSampleTooSmall, "n must be at least K");
    require(config.n <= static_cast<std::int64_t>(frame.rows()), ErrorCode::kSampleExceedsPopulation,
            "n must not exceed N");
  }

  SelectionResult result;
  result.metric = metric;
  result.config = config;
  result.final_metric = std::numeric_limits<double>::infinity();

  std::vector<bool> in_subset(p, false);
  while (result.selected.size() < config.theta) {
    const std::size_t step = result.selected.size();
    SearchStep record;
    record.step = step;
    for (std::size_t f = 0; f < p; ++f)
      if (!in_subset[f]) record.candidates.push_back({f, 0.0, candidate_seed(config.seed, step, f)});

    parallel_for(record.candidates.size(), config.threads, [&](std::size_t c) {
      CandidateScore& cand = record.candidates[c];
      std::vector<std::size_t> features = result.selected;
      features.push_back(cand.feature);
      const auto partition = kmeans_fit(frame, std::move(features), config.k, cand.seed, config.kmeans);
      cand.metric = metric == SearchMetric::kVariance
                        ? stratification_variance(frame, partition, config.n, config.allocator)
                        : wcss(partition, frame);
    });
    result.evaluations += record.candidates.size();

    // Candidates are in feature order, so the first minimum is the lowest index.
    const auto best = std::min_element(
        record.candidates.begin(), record.candidates.end(),
        [](const CandidateScore& a, const CandidateScore& b) { return a.metric < b.metric; });
    record.chosen = best->feature;
    record.chosen_metric = best->metric;
    record.accepted = best->metric < result.final_metric;
    if (record.accepted) {
      result.selected.push_back(best->feature);
      in_subset[best->feature] = true;
      result.final_metric = best->metric;
      result.final_seed = best->seed;
    }
    record.metric_after = result.final_metric;
    const bool accepted = record.accepted;
    result.trace.push_back(std::move(record));
    if (!accepted) {
      result.terminated_early = true;
      break;
    }
  }
  return result;
}

}  // namespace

SelectionResult sfs_variance_reduction(const PopulationFrame& frame, const SearchConfig& config) {
  return forward_search(frame, config, SearchMetric::kVariance);
}

SelectionResult sfs_wcss(const PopulationFrame& frame, const SearchConfig& config) {
  return forward_search(frame, config, SearchMetric::kWcss);
}

}  // namespace stratsel
