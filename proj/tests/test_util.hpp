#ifndef STRATSEL_TESTS_TEST_UTIL_HPP_
#define STRATSEL_TESTS_TEST_UTIL_HPP_

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "stratsel/frame.hpp"

namespace stratsel::testing {

// Single-covariate frame with the given covariate values and outcome.
inline PopulationFrame frame_1d(std::vector<double> x, std::vector<double> y = {}) {
  if (y.empty()) y = x;
  return PopulationFrame(std::move(x), std::move(y), {"x"}, "y");
}

inline PopulationFrame frame_from_columns(const std::vector<std::vector<double>>& columns,
                                          std::vector<double> outcome) {
  const std::size_t n = outcome.size();
  const std::size_t p = columns.size();
  std::vector<double> data(n * p);
  std::vector<std::string> names;
  for (std::size_t j = 0; j < p; ++j) {
    names.push_back("x" + std::to_string(j));
    for (std::size_t i = 0; i < n; ++i) data[i * p + j] = columns[j][i];
  }
  return PopulationFrame(std::move(data), std::move(outcome), std::move(names), "y");
}

inline bool near_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({1e-300, std::abs(a), std::abs(b)});
}

}  // namespace stratsel::testing

#endif  // STRATSEL_TESTS_TEST_UTIL_HPP_
