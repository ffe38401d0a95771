#include "stratsel/synthgen.hpp"

#include <cmath>
#include <string>

#include "stratsel/error.hpp"
#include "stratsel/rng.hpp"

namespace stratsel {

BetaKind parse_beta_kind(std::string_view name) {
  if (name == "type1" || name == "1") return BetaKind::kType1;
  if (name == "type2" || name == "2") return BetaKind::kType2;
  throw Error(ErrorCode::kBadConfig, "unknown beta kind '" + std::string(name) + "'");
}

std::string_view beta_kind_name(BetaKind kind) {
  return kind == BetaKind::kType1 ? "type1" : "type2";
}

std::vector<double> beta_pattern(BetaKind kind, std::size_t p) {
  require(p >= 17, ErrorCode::kPTooSmall, "beta patterns need p >= 17, got " + std::to_string(p));
  std::vector<double> beta(p, 0.0);
  const double type2[] = {10.0, 8.0, 6.0, 4.0, 2.0};
  for (std::size_t i = 0; i < 5; ++i) beta[4 * i] = kind == BetaKind::kType1 ? 1.0 : type2[i];
  return beta;
}

double signal_variance(std::span<const double> beta, double rho) {
  double total = 0.0;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    if (beta[i] == 0.0) continue;
    for (std::size_t j = 0; j < beta.size(); ++j) {
      const auto lag = static_cast<double>(i > j ? i - j : j - i);
      total += beta[i] * beta[j] * std::pow(rho, lag);
    }
  }
  return total;
}

namespace {

void validate(const SynthConfig& c) {
  require(c.n >= 1, ErrorCode::kBadConfig, "N must be at least 1");
  require(!c.beta.empty(), ErrorCode::kBadConfig, "p must be at least 1");
  require(c.snr > 0.0 && std::isfinite(c.snr), ErrorCode::kBadConfig, "snr must be positive");
  require(c.rho >= 0.0 && c.rho < 1.0, ErrorCode::kBadConfig, "rho must lie in [0, 1)");
  require(signal_variance(c.beta, c.rho) > 0.0, ErrorCode::kBadConfig,
          "signal variance is zero; SNR is undefined");
}

}  // namespace

double noise_variance(const SynthConfig& config) {
  validate(config);
  return signal_variance(config.beta, config.rho) / config.snr;
}

PopulationFrame generate(const SynthConfig& config) {
  validate(config);
  const std::size_t p = config.beta.size();
  const double noise_sd = std::sqrt(noise_variance(config));
  const double innovation = std::sqrt(1.0 - config.rho * config.rho);

  Rng rng = make_rng(config.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x(config.n * p);
  std::vector<double> y(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    double* row = &x[i * p];
    // AR(1) recursion realizes Sigma_ij = rho^|i-j| with unit marginals.
    row[0] = normal(rng);
    for (std::size_t j = 1; j < p; ++j) row[j] = config.rho * row[j - 1] + innovation * normal(rng);
    double signal = 0.0;
    for (std::size_t j = 0; j < p; ++j) signal += config.beta[j] * row[j];
    y[i] = signal + noise_sd * normal(rng);
  }
  std::vector<std::string> names;
  for (std::size_t j = 0; j < p; ++j) names.push_back("X" + std::to_string(j + 1));
  return PopulationFrame(std::move(x), std::move(y), std::move(names), "Y");
}

std::pair<PopulationFrame, PopulationFrame> generate_train_test(const SynthConfig& config) {
  SynthConfig train = config;
  SynthConfig test = config;
  train.seed = derive_seed(config.seed, {0x7261696eULL});
  test.seed = derive_seed(config.seed, {0x74657374ULL});
  return {generate(train), generate(test)};
}

}  // namespace stratsel
