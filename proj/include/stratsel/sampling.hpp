#ifndef STRATSEL_SAMPLING_HPP_
#define STRATSEL_SAMPLING_HPP_

#include <cstdint>
#include <vector>

#include "stratsel/rng.hpp"

namespace stratsel {

// Draws m distinct indices uniformly from [0, population) into `out`
// (cleared first). Uses a per-thread identity pool with a partial
// Fisher-Yates shuffle that is undone afterwards, so every call depends only
// on the RNG state passed in.
void sample_without_replacement(std::uint32_t population, std::uint32_t m, Rng& rng,
                                std::vector<std::uint32_t>& out);

}  // namespace stratsel

#endif  // STRATSEL_SAMPLING_HPP_
