#ifndef STRATSEL_SYNTHGEN_HPP_
#define STRATSEL_SYNTHGEN_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "stratsel/frame.hpp"

namespace stratsel {

enum class BetaKind { kType1, kType2 };

BetaKind parse_beta_kind(std::string_view name);  // "type1" | "type2"
std::string_view beta_kind_name(BetaKind kind);

// Nonzero coefficients on X_1, X_5, X_9, X_13, X_17 (zero-based 0, 4, 8,
// 12, 16): all ones for type 1, (10, 8, 6, 4, 2) for type 2.
std::vector<double> beta_pattern(BetaKind kind, std::size_t p);

struct SynthConfig {
  std::size_t n = 100000;
  std::vector<double> beta;
  double snr = 1.0;
  double rho = 0.35;
  std::uint64_t seed = 0;
};

// beta' Sigma beta with Sigma_ij = rho^|i-j|.
double signal_variance(std::span<const double> beta, double rho);

// Noise variance giving the configured SNR.
double noise_variance(const SynthConfig& config);

// Rows X ~ N(0, Sigma) with AR(1) covariance, Y = X beta + eps. Covariates
// are named X1..Xp and the outcome Y.
PopulationFrame generate(const SynthConfig& config);

// Train and test populations from one master seed.
std::pair<PopulationFrame, PopulationFrame> generate_train_test(const SynthConfig& config);

}  // namespace stratsel

#endif  // STRATSEL_SYNTHGEN_HPP_
