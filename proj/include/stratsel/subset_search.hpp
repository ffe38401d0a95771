#ifndef STRATSEL_SUBSET_SEARCH_HPP_
#define STRATSEL_SUBSET_SEARCH_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stratsel/allocation.hpp"
#include "stratsel/frame.hpp"
#include "stratsel/kmeans.hpp"

namespace stratsel {

enum class SearchMetric { kVariance, kWcss };

struct CandidateScore {
  std::size_t feature = 0;
  double metric = 0.0;
  std::uint64_t seed = 0;  // K-means seed used for this evaluation
};

struct SearchStep {
  std::size_t step = 0;
  std::vector<CandidateScore> candidates;  // in feature order
  std::size_t chosen = 0;                  // arg min, ties to the lowest index
  double chosen_metric = 0.0;
  bool accepted = false;
  double metric_after = 0.0;  // incumbent metric after this step
};

struct SearchConfig {
  int k = 6;
  std::size_t theta = 5;
  // Only used by the variance metric.
  std::int64_t n = 0;
  AllocationMethod allocator = AllocationMethod::kProportional;
  std::uint64_t seed = 0;
  KMeansOptions kmeans;
  unsigned threads = 1;
};

struct SelectionResult {
  SearchMetric metric = SearchMetric::kVariance;
  std::vector<std::size_t> selected;  // in selection order
  // +infinity when nothing was selected.
  double final_metric = 0.0;
  std::vector<SearchStep> trace;
  bool terminated_early = false;
  std::size_t evaluations = 0;
  // Seed of the K-means fit that scored the final subset; refitting with it
  // reproduces the evaluated partition.
  std::optional<std::uint64_t> final_seed;
  SearchConfig config;
};

// Seed for the K-means fit that scores candidate `feature` at `step`.
std::uint64_t candidate_seed(std::uint64_t master, std::size_t step, std::size_t feature);

// Variance of the stratified mean (with fpc) obtained by clustering `frame`
// on `features`, allocating `n` with `allocator` and evaluating on the
// training strata.
double stratification_variance(const PopulationFrame& frame, const StratumPartition& partition,
                               std::int64_t n, AllocationMethod allocator);

// Sequential forward search minimizing the stratified-mean variance.
SelectionResult sfs_variance_reduction(const PopulationFrame& frame, const SearchConfig& config);

// Conventional forward search minimizing standardized WCSS.
SelectionResult sfs_wcss(const PopulationFrame& frame, const SearchConfig& config);

}  // namespace stratsel

#endif  // STRATSEL_SUBSET_SEARCH_HPP_
