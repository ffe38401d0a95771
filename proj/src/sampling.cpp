#include "stratsel/sampling.hpp"

#include <numeric>
#include <utility>

#include "stratsel/error.hpp"

namespace stratsel {

void sample_without_replacement(std::uint32_t population, std::uint32_t m, Rng& rng,
                                std::vector<std::uint32_t>& out) {
  require(m <= population, ErrorCode::kPrecondition, "sample larger than population");
  thread_local std::vector<std::uint32_t> pool;
  thread_local std::vector<std::uint32_t> swaps;
  if (pool.size() < population) {
    const auto old = static_cast<std::uint32_t>(pool.size());
    pool.resize(population);
    std::iota(pool.begin() + old, pool.end(), old);
  }
  out.clear();
  swaps.clear();
  for (std::uint32_t i = 0; i < m; ++i) {
    const auto j = i + static_cast<std::uint32_t>(uniform_below(rng, population - i));
    std::swap(pool[i], pool[j]);
    swaps.push_back(j);
    out.push_back(pool[i]);
  }
  for (std::uint32_t i = m; i-- > 0;) std::swap(pool[i], pool[swaps[i]]);
}

}  // namespace stratsel
