#include "stratsel/allocation.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <queue>

#include "stratsel/error.hpp"

namespace stratsel {

std::string_view allocation_method_name(AllocationMethod method) {
  switch (method) {
    case AllocationMethod::kProportional: return "proportional";
    case AllocationMethod::kOptimal: return "optimal";
    case AllocationMethod::kManual: return "manual";
  }
  return "manual";
}

AllocationMethod parse_allocation_method(std::string_view name) {
  if (name == "proportional") return AllocationMethod::kProportional;
  if (name == "optimal") return AllocationMethod::kOptimal;
  if (name == "manual") return AllocationMethod::kManual;
  throw Error(ErrorCode::kBadConfig, "unknown allocator '" + std::string(name) + "'");
}

AllocationBounds default_bounds(const StratumStats& stats, std::int64_t n) {
  AllocationBounds b;
  b.lower.assign(stats.strata(), 1);
  b.upper.resize(stats.strata());
  for (std::size_t k = 0; k < stats.strata(); ++k) b.upper[k] = std::min(stats.sizes[k], n);
  return b;
}

void check_bounds(const StratumStats& stats, std::int64_t n, const AllocationBounds& bounds) {
  const std::size_t K = stats.strata();
  require(bounds.lower.size() == K && bounds.upper.size() == K, ErrorCode::kInfeasibleBounds,
          "bounds do not match the number of strata");
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  for (std::size_t k = 0; k < K; ++k) {
    require(1 <= bounds.lower[k] && bounds.lower[k] <= bounds.upper[k] &&
                bounds.upper[k] <= stats.sizes[k],
            ErrorCode::kInfeasibleBounds,
            "stratum " + std::to_string(k) + " needs 1 <= l <= u <= N_k");
    lo += bounds.lower[k];
    hi += bounds.upper[k];
  }
  require(lo <= n && n <= hi, ErrorCode::kInfeasibleBounds,
          "n=" + std::to_string(n) + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

double allocation_objective(const StratumStats& stats, std::span<const std::int64_t> sizes) {
  require(sizes.size() == stats.strata(), ErrorCode::kLengthMismatch, "plan/strata mismatch");
  double total = 0.0;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const auto nk = static_cast<double>(stats.sizes[k]);
    total += nk * nk * stats.variances[k] / static_cast<double>(sizes[k]);
  }
  return total;
}

AllocationPlan proportional(const StratumStats& stats, std::int64_t n) {
  const std::size_t K = stats.strata();
  const std::int64_t N = stats.population();
  require(n >= static_cast<std::int64_t>(K), ErrorCode::kSampleTooSmall,
          "n=" + std::to_string(n) + " is smaller than K=" + std::to_string(K));
  require(n <= N, ErrorCode::kSampleExceedsPopulation,
          "n=" + std::to_string(n) + " exceeds N=" + std::to_string(N));

  // Integer quotas: N_k n = q_k N + r_k, so remainders compare exactly.
  AllocationPlan plan{std::vector<std::int64_t>(K), n, AllocationMethod::kProportional};
  std::vector<std::int64_t> remainder(K);
  std::int64_t assigned = 0;
  for (std::size_t k = 0; k < K; ++k) {
    const __int128 product = static_cast<__int128>(stats.sizes[k]) * n;
    plan.sizes[k] = static_cast<std::int64_t>(product / N);
    remainder[k] = static_cast<std::int64_t>(product % N);
    assigned += plan.sizes[k];
  }
  std::vector<std::size_t> order(K);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::int64_t i = 0; i < n - assigned; ++i) ++plan.sizes[order[static_cast<std::size_t>(i)]];

  for (std::size_t k = 0; k < K; ++k) {
    while (plan.sizes[k] == 0) {
      auto donor = static_cast<std::size_t>(
          std::max_element(plan.sizes.begin(), plan.sizes.end()) - plan.sizes.begin());
      --plan.sizes[donor];
      ++plan.sizes[k];
    }
  }
  return plan;
}

AllocationPlan optimal(const StratumStats& stats, std::int64_t n, const AllocationBounds& bounds) {
  check_bounds(stats, n, bounds);
  const std::size_t K = stats.strata();
  AllocationPlan plan{bounds.lower, n, AllocationMethod::kOptimal};

  std::vector<double> weight(K);
  for (std::size_t k = 0; k < K; ++k) {
    const auto nk = static_cast<double>(stats.sizes[k]);
    weight[k] = nk * nk * stats.variances[k];
  }
  // Decrease of N_k^2 s_k^2 / n_k when n_k grows by one.
  auto gain = [&](std::size_t k) {
    const auto m = static_cast<double>(plan.sizes[k]);
    return weight[k] / (m * (m + 1.0));
  };
  struct Entry {
    double gain;
    std::size_t stratum;
  };
  auto worse = [](const Entry& a, const Entry& b) {
    if (a.gain != b.gain) return a.gain < b.gain;
    return a.stratum > b.stratum;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> heap(worse);
  for (std::size_t k = 0; k < K; ++k)
    if (plan.sizes[k] < bounds.upper[k]) heap.push({gain(k), k});

  std::int64_t remaining = n - std::accumulate(plan.sizes.begin(), plan.sizes.end(), std::int64_t{0});
  while (remaining > 0) {
    const Entry top = heap.top();
    heap.pop();
    ++plan.sizes[top.stratum];
    --remaining;
    if (plan.sizes[top.stratum] < bounds.upper[top.stratum]) heap.push({gain(top.stratum), top.stratum});
  }
  return plan;
}

AllocationPlan optimal(const StratumStats& stats, std::int64_t n) {
  const std::int64_t N = stats.population();
  require(n >= static_cast<std::int64_t>(stats.strata()), ErrorCode::kSampleTooSmall,
          "n=" + std::to_string(n) + " is smaller than K=" + std::to_string(stats.strata()));
  require(n <= N, ErrorCode::kSampleExceedsPopulation,
          "n=" + std::to_string(n) + " exceeds N=" + std::to_string(N));
  return optimal(stats, n, default_bounds(stats, n));
}

AllocationPlan allocate(const StratumStats& stats, std::int64_t n, AllocationMethod method) {
  switch (method) {
    case AllocationMethod::kProportional: return proportional(stats, n);
    case AllocationMethod::kOptimal: return optimal(stats, n);
    case AllocationMethod::kManual: break;
  }
  throw Error(ErrorCode::kBadConfig, "manual plans cannot be computed");
}

AllocationPlan brute_force_optimal(const StratumStats& stats, std::int64_t n,
                                   const AllocationBounds& bounds, std::uint64_t max_points) {
  check_bounds(stats, n, bounds);
  const std::size_t K = stats.strata();
  // Size of the box lattice over the first K-1 coordinates (the last one is
  // determined by the sum constraint).
  double lattice = 1.0;
  for (std::size_t k = 0; k + 1 < K; ++k)
    lattice *= static_cast<double>(bounds.upper[k] - bounds.lower[k] + 1);
  require(lattice <= static_cast<double>(max_points), ErrorCode::kInstanceTooLarge,
          "feasible lattice too large for exhaustive search");

  std::vector<std::int64_t> current = bounds.lower;
  std::vector<std::int64_t> best;
  double best_value = std::numeric_limits<double>::infinity();

  // Enumerates coordinates in lexicographic order so the first strict
  // improvement wins ties.
  auto recurse = [&](auto&& self, std::size_t k, std::int64_t used) -> void {
    if (k + 1 == K) {
      const std::int64_t last = n - used;
      if (last < bounds.lower[k] || last > bounds.upper[k]) return;
      current[k] = last;
      const double value = allocation_objective(stats, current);
      if (value < best_value) {
        best_value = value;
        best = current;
      }
      return;
    }
    for (std::int64_t v = bounds.lower[k]; v <= bounds.upper[k]; ++v) {
      current[k] = v;
      self(self, k + 1, used + v);
    }
  };
  recurse(recurse, 0, 0);
  require(!best.empty(), ErrorCode::kInfeasibleBounds, "no feasible allocation");
  return AllocationPlan{std::move(best), n, AllocationMethod::kOptimal};
}

}  // namespace stratsel
