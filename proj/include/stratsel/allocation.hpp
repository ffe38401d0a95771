#ifndef STRATSEL_ALLOCATION_HPP_
#define STRATSEL_ALLOCATION_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stratsel/stats.hpp"

namespace stratsel {

enum class AllocationMethod { kProportional, kOptimal, kManual };

std::string_view allocation_method_name(AllocationMethod method);
AllocationMethod parse_allocation_method(std::string_view name);  // throws BadConfig

struct AllocationPlan {
  std::vector<std::int64_t> sizes;
  std::int64_t total = 0;
  AllocationMethod method = AllocationMethod::kManual;
};

struct AllocationBounds {
  std::vector<std::int64_t> lower;
  std::vector<std::int64_t> upper;
};

// lower = 1, upper = min(N_k, n).
AllocationBounds default_bounds(const StratumStats& stats, std::int64_t n);

// Throws InfeasibleBounds unless 1 <= l_k <= u_k <= N_k and
// sum(l) <= n <= sum(u).
void check_bounds(const StratumStats& stats, std::int64_t n, const AllocationBounds& bounds);

// Allocation objective sum_k N_k^2 sigma_k^2 / n_k.
double allocation_objective(const StratumStats& stats, std::span<const std::int64_t> sizes);

// Quotas N_k n / N rounded by largest remainder (ties to the lower index),
// then zeros raised to one by taking units from the largest stratum.
AllocationPlan proportional(const StratumStats& stats, std::int64_t n);

// Exact minimizer of the allocation objective by greedy marginal allocation.
AllocationPlan optimal(const StratumStats& stats, std::int64_t n, const AllocationBounds& bounds);
AllocationPlan optimal(const StratumStats& stats, std::int64_t n);

AllocationPlan allocate(const StratumStats& stats, std::int64_t n, AllocationMethod method);

// Exhaustive search over the feasible lattice; lexicographically smallest
// minimizer. Throws InstanceTooLarge when the lattice exceeds max_points.
AllocationPlan brute_force_optimal(const StratumStats& stats, std::int64_t n,
                                   const AllocationBounds& bounds,
                                   std::uint64_t max_points = 10'000'000);

}  // namespace stratsel

#endif  // STRATSEL_ALLOCATION_HPP_
