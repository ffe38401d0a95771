#include "stratsel/eval_harness.hpp"

#include <algorithm>
#include <numeric>

#include "stratsel/baselines.hpp"
#include "stratsel/error.hpp"
#include "stratsel/parallel.hpp"
#include "stratsel/sampling.hpp"
#include "stratsel/subset_search.hpp"
#include "stratsel/variance.hpp"

namespace stratsel {

std::vector<double> draw_realizations(const Sampler& sampler, std::size_t replications,
                                      std::uint64_t seed, unsigned threads) {
  std::vector<double> values(replications);
  parallel_for(replications, threads, [&](std::size_t i) {
    Rng rng = make_rng(derive_seed(seed, {static_cast<std::uint64_t>(i)}));
    values[i] = sampler(rng);
  });
  return values;
}

double estimate_sampling_variance(const Sampler& sampler, std::size_t replications,
                                  std::uint64_t seed, unsigned threads) {
  require(replications >= 2, ErrorCode::kPrecondition, "at least two replications are required");
  return population_variance(draw_realizations(sampler, replications, seed, threads));
}

double variance_reduction_rate(double var_method, double var_srs) {
  require(var_srs > 0.0, ErrorCode::kZeroBaselineVariance, "baseline variance must be positive");
  return (1.0 - var_method / var_srs) * 100.0;
}

namespace {

// Adds `units` over strata in proportion to capacity, largest remainder
// first (ties to the lower index). Never exceeds capacity.
void distribute_by_capacity(std::vector<std::int64_t>& sizes, const std::vector<std::int64_t>& caps,
                            std::int64_t units) {
  const std::size_t K = sizes.size();
  while (units > 0) {
    std::vector<std::int64_t> room(K);
    std::int64_t total_room = 0;
    for (std::size_t k = 0; k < K; ++k) {
      room[k] = caps[k] - sizes[k];
      total_room += room[k];
    }
    require(total_room >= units, ErrorCode::kOverAllocated, "plan exceeds test population");
    std::vector<std::int64_t> remainder(K);
    std::int64_t given = 0;
    for (std::size_t k = 0; k < K; ++k) {
      const __int128 product = static_cast<__int128>(room[k]) * units;
      const auto share = static_cast<std::int64_t>(product / total_room);
      remainder[k] = static_cast<std::int64_t>(product % total_room);
      sizes[k] += share;
      given += share;
    }
    std::vector<std::size_t> order(K);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    std::int64_t left = units - given;
    for (std::size_t idx = 0; idx < K && left > 0; ++idx) {
      const std::size_t k = order[idx];
      if (remainder[k] > 0 && sizes[k] < caps[k]) {
        ++sizes[k];
        --left;
      }
    }
    units = left;
  }
}

}  // namespace

AllocationPlan align_plan(const AllocationPlan& plan, const StratumStats& plan_strata,
                          const StratumStats& target_strata) {
  require(plan.sizes.size() == plan_strata.strata(), ErrorCode::kLengthMismatch,
          "plan does not match its strata");
  const std::size_t K = target_strata.strata();
  require(plan.total >= static_cast<std::int64_t>(K), ErrorCode::kSampleTooSmall,
          "sample smaller than the number of test strata");
  require(plan.total <= target_strata.population(), ErrorCode::kOverAllocated,
          "sample larger than the test population");

  AllocationPlan out{std::vector<std::int64_t>(K, 0), plan.total, plan.method};
  std::int64_t placed = 0;
  for (std::size_t k = 0; k < K; ++k) {
    const int source = plan_strata.index_of(target_strata.labels[k]);
    if (source < 0) continue;
    out.sizes[k] = std::min(plan.sizes[static_cast<std::size_t>(source)], target_strata.sizes[k]);
    placed += out.sizes[k];
  }
  distribute_by_capacity(out.sizes, target_strata.sizes, plan.total - placed);
  for (std::size_t k = 0; k < K; ++k) {
    while (out.sizes[k] == 0) {
      auto donor = static_cast<std::size_t>(
          std::max_element(out.sizes.begin(), out.sizes.end()) - out.sizes.begin());
      --out.sizes[donor];
      ++out.sizes[k];
    }
  }
  return out;
}

StratifiedSampler::StratifiedSampler(const PopulationFrame& frame, std::span<const Label> labels,
                                     const AllocationPlan& plan)
    : stats_(stratum_stats(frame, labels)), plan_(plan) {
  require(plan_.sizes.size() == stats_.strata(), ErrorCode::kLengthMismatch,
          "plan does not match the frame's strata");
  for (std::size_t k = 0; k < stats_.strata(); ++k) {
    require(plan_.sizes[k] >= 1, ErrorCode::kPrecondition, "every stratum needs a sample");
    require(plan_.sizes[k] <= stats_.sizes[k], ErrorCode::kOverAllocated,
            "stratum " + std::to_string(k) + " allocation exceeds its size");
  }
  const auto compact = compact_labels(stats_, labels);
  stratum_outcomes_.resize(stats_.strata());
  for (std::size_t k = 0; k < stats_.strata(); ++k)
    stratum_outcomes_[k].reserve(static_cast<std::size_t>(stats_.sizes[k]));
  for (std::size_t i = 0; i < frame.rows(); ++i)
    stratum_outcomes_[static_cast<std::size_t>(compact[i])].push_back(frame.outcome()[i]);
}

double StratifiedSampler::draw(Rng& rng) const {
  thread_local std::vector<std::uint32_t> picked;
  std::vector<double> means(stats_.strata());
  for (std::size_t k = 0; k < stats_.strata(); ++k) {
    const auto& values = stratum_outcomes_[k];
    sample_without_replacement(static_cast<std::uint32_t>(values.size()),
                               static_cast<std::uint32_t>(plan_.sizes[k]), rng, picked);
    double sum = 0.0;
    for (auto i : picked) sum += values[i];
    means[k] = sum / static_cast<double>(plan_.sizes[k]);
  }
  return stratified_mean(means, stats_);
}

double StratifiedSampler::analytic_variance() const { return stratified_variance(stats_, plan_); }

double stratified_sample_mean(const PopulationFrame& test, const StratumPartition& partition,
                              const AllocationPlan& plan, Rng& rng) {
  const auto labels = kmeans_assign(partition, test);
  return StratifiedSampler(test, labels, plan).draw(rng);
}

std::string_view method_name(Method method) {
  switch (method) {
    case Method::kSrs: return "SRS";
    case Method::kCuped: return "CUPED";
    case Method::kCoss: return "COSS";
    case Method::kKMeans: return "K-means";
    case Method::kSfsKm: return "SFS-KM";
    case Method::kSfsKmV: return "SFS-KM-V";
  }
  return "SRS";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::kSrs, Method::kCuped, Method::kCoss, Method::kKMeans, Method::kSfsKm,
                   Method::kSfsKmV})
    if (name == method_name(m)) return m;
  throw Error(ErrorCode::kBadConfig, "unknown method '" + std::string(name) + "'");
}

bool is_stratified(Method method) {
  return method == Method::kKMeans || method == Method::kSfsKm || method == Method::kSfsKmV;
}

namespace {

std::uint64_t method_stream(Method method, std::optional<AllocationMethod> allocator) {
  return (static_cast<std::uint64_t>(method) << 8) |
         (allocator ? static_cast<std::uint64_t>(*allocator) + 1 : 0);
}

}  // namespace

EvaluationReport run_experiment(const PopulationFrame& train, const PopulationFrame& test,
                                const ExperimentSpec& spec) {
  require(train.covariate_names() == test.covariate_names(), ErrorCode::kBadConfig,
          "train and test covariates differ");
  require(!spec.methods.empty(), ErrorCode::kBadConfig, "no methods requested");
  require(spec.replications >= 2, ErrorCode::kBadConfig, "replications must be at least 2");
  require(spec.n >= 1 && spec.n <= static_cast<std::int64_t>(test.rows()),
          ErrorCode::kSampleExceedsPopulation, "n must lie in [1, N_test]");
  const bool any_stratified = std::any_of(spec.methods.begin(), spec.methods.end(), is_stratified);
  if (any_stratified) {
    require(!spec.allocators.empty(), ErrorCode::kBadConfig, "no allocators requested");
    require(spec.n >= spec.k, ErrorCode::kSampleTooSmall, "n must be at least K");
    require(spec.n <= static_cast<std::int64_t>(train.rows()), ErrorCode::kSampleExceedsPopulation,
            "n must not exceed N_train");
  }

  EvaluationReport report;
  report.replications = spec.replications;
  report.n = spec.n;
  report.seed = spec.seed;
  report.k = spec.k;
  report.theta = spec.theta;
  report.p = train.cols();
  report.n_train = train.rows();
  report.n_test = test.rows();
  report.dataset = spec.dataset;
  report.covariate_names = train.covariate_names();

  auto estimate = [&](const Sampler& sampler, Method method, std::optional<AllocationMethod> alloc) {
    return estimate_sampling_variance(sampler, spec.replications,
                                      derive_seed(spec.seed, {0xe7a1ULL, method_stream(method, alloc)}),
                                      spec.threads);
  };

  const std::int64_t n = spec.n;
  const Sampler srs = [&](Rng& rng) { return srs_mean(test, n, rng); };
  report.srs_variance = estimate(srs, Method::kSrs, std::nullopt);

  SearchConfig search;
  search.k = spec.k;
  search.theta = spec.theta;
  search.n = spec.n;
  search.seed = derive_seed(spec.seed, {0x5e1ec7ULL});
  search.kmeans = spec.kmeans;
  search.threads = spec.threads;

  std::optional<SelectionResult> wcss_selection;
  std::vector<MethodResult> results;
  for (Method method : spec.methods) {
    if (method == Method::kSrs) {
      results.push_back({method, std::nullopt, report.srs_variance, 0.0, std::nullopt, {}, {}});
      continue;
    }
    if (method == Method::kCuped || method == Method::kCoss) {
      const std::size_t covariate = pick_covariate(train);
      double variance;
      if (method == Method::kCuped) {
        const CupedModel model = with_population_mean(cuped_fit(train, covariate), test);
        const Sampler sampler = [&](Rng& rng) {
          thread_local std::vector<std::uint32_t> picked;
          sample_without_replacement(static_cast<std::uint32_t>(test.rows()),
                                     static_cast<std::uint32_t>(n), rng, picked);
          double sy = 0.0;
          double sx = 0.0;
          for (auto i : picked) {
            sy += test.outcome()[i];
            sx += test.covariate(i, covariate);
          }
          const auto nd = static_cast<double>(n);
          return cuped_adjusted_mean(sy / nd, sx / nd, model);
        };
        variance = estimate(sampler, method, std::nullopt);
      } else {
        const CossSampler coss(test, covariate);
        variance = estimate([&](Rng& rng) { return coss.draw(n, rng); }, method, std::nullopt);
      }
      results.push_back({method, std::nullopt, variance,
                         variance_reduction_rate(variance, report.srs_variance), std::nullopt,
                         {covariate}, {}});
      continue;
    }

    for (AllocationMethod allocator : spec.allocators) {
      StratumPartition partition;
      if (method == Method::kKMeans) {
        std::vector<std::size_t> all(train.cols());
        std::iota(all.begin(), all.end(), 0);
        partition = kmeans_fit(train, all, spec.k, derive_seed(spec.seed, {0xa11ULL}), spec.kmeans);
      } else {
        require(spec.theta >= 1, ErrorCode::kBadConfig, "forward search methods need theta >= 1");
        SelectionResult selection;
        if (method == Method::kSfsKm) {
          if (!wcss_selection) wcss_selection = sfs_wcss(train, search);
          selection = *wcss_selection;
        } else {
          SearchConfig cfg = search;
          cfg.allocator = allocator;
          selection = sfs_variance_reduction(train, cfg);
        }
        partition = kmeans_fit(train, selection.selected, spec.k, *selection.final_seed, spec.kmeans);
      }
      const StratumStats train_stats = stratum_stats(train, partition.train_labels);
      const AllocationPlan train_plan = allocate(train_stats, n, allocator);
      const auto test_labels = kmeans_assign(partition, test);
      const StratumStats test_stats = stratum_stats(test, test_labels);
      const AllocationPlan test_plan = align_plan(train_plan, train_stats, test_stats);
      const StratifiedSampler sampler(test, test_labels, test_plan);
      const double variance =
          estimate([&](Rng& rng) { return sampler.draw(rng); }, method, allocator);
      results.push_back({method, allocator, variance,
                         variance_reduction_rate(variance, report.srs_variance),
                         sampler.analytic_variance(), partition.features, test_plan.sizes});
    }
  }
  report.methods = std::move(results);
  return report;
}

}  // namespace stratsel
