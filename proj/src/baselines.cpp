#include "stratsel/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stratsel/error.hpp"
#include "stratsel/sampling.hpp"
#include "stratsel/stats.hpp"

namespace stratsel {

namespace {

struct Moments {
  double var_x = 0.0;
  double var_y = 0.0;
  double cov = 0.0;
};

Moments moments(std::span<const double> x, std::span<const double> y) {
  const double mx = mean_of(x);
  const double my = mean_of(y);
  Moments m;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    m.var_x += dx * dx;
    m.var_y += dy * dy;
    m.cov += dx * dy;
  }
  const auto n = static_cast<double>(x.size());
  m.var_x /= n;
  m.var_y /= n;
  m.cov /= n;
  return m;
}

bool is_constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  require(x.size() == y.size(), ErrorCode::kLengthMismatch, "correlation inputs differ in length");
  if (x.empty() || is_constant(x) || is_constant(y)) return 0.0;
  const Moments m = moments(x, y);
  if (m.var_x <= 0.0 || m.var_y <= 0.0) return 0.0;
  return m.cov / std::sqrt(m.var_x * m.var_y);
}

std::size_t pick_covariate(const PopulationFrame& frame) {
  std::size_t best = 0;
  double best_score = -1.0;
  bool any_varying = false;
  for (std::size_t j = 0; j < frame.cols(); ++j) {
    const auto x = frame.covariate_column(j);
    if (!is_constant(x)) any_varying = true;
    const double score = std::abs(pearson_correlation(x, frame.outcome()));
    if (score > best_score) {
      best_score = score;
      best = j;
    }
  }
  require(any_varying, ErrorCode::kAllConstantCovariates, "every covariate is constant");
  return best;
}

CupedModel cuped_fit(const PopulationFrame& train, std::size_t covariate_index) {
  require(covariate_index < train.cols(), ErrorCode::kBadFeatureIndex, "covariate index out of range");
  const auto x = train.covariate_column(covariate_index);
  require(!is_constant(x), ErrorCode::kZeroVarianceCovariate, "CUPED covariate is constant");
  const Moments m = moments(x, train.outcome());
  require(m.var_x > 0.0, ErrorCode::kZeroVarianceCovariate, "CUPED covariate has zero variance");
  return CupedModel{covariate_index, m.cov / m.var_x, mean_of(x)};
}

CupedModel with_population_mean(CupedModel model, const PopulationFrame& population) {
  require(model.covariate_index < population.cols(), ErrorCode::kBadFeatureIndex,
          "covariate index out of range");
  model.covariate_population_mean = mean_of(population.covariate_column(model.covariate_index));
  return model;
}

double cuped_adjusted_mean(double sample_outcome_mean, double sample_covariate_mean,
                           const CupedModel& model) {
  return sample_outcome_mean - model.theta * (sample_covariate_mean - model.covariate_population_mean);
}

CossSampler::CossSampler(const PopulationFrame& frame, std::size_t covariate_index) {
  require(covariate_index < frame.cols(), ErrorCode::kBadFeatureIndex, "covariate index out of range");
  std::vector<std::size_t> order(frame.rows());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return frame.covariate(a, covariate_index) < frame.covariate(b, covariate_index);
  });
  sorted_outcome_.reserve(order.size());
  for (std::size_t i : order) sorted_outcome_.push_back(frame.outcome()[i]);
}

double CossSampler::mean_at_offset(std::int64_t n, double offset) const {
  const auto N = static_cast<std::int64_t>(population());
  require(n >= 1 && n <= N, ErrorCode::kPrecondition, "n must lie in [1, N]");
  require(offset >= 0.0 && offset < 1.0, ErrorCode::kPrecondition, "offset must lie in [0, 1)");
  const double stride = static_cast<double>(N) / static_cast<double>(n);
  double sum = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    auto pos = static_cast<std::int64_t>(std::floor((static_cast<double>(i) + offset) * stride));
    pos = std::min(pos, N - 1);
    sum += sorted_outcome_[static_cast<std::size_t>(pos)];
  }
  return sum / static_cast<double>(n);
}

double CossSampler::draw(std::int64_t n, Rng& rng) const {
  return mean_at_offset(n, uniform_unit(rng));
}

double coss_mean(const PopulationFrame& frame, std::size_t covariate_index, std::int64_t n, Rng& rng) {
  return CossSampler(frame, covariate_index).draw(n, rng);
}

double srs_mean(const PopulationFrame& frame, std::int64_t n, Rng& rng) {
  const auto N = static_cast<std::int64_t>(frame.rows());
  require(n >= 1 && n <= N, ErrorCode::kPrecondition, "n must lie in [1, N]");
  std::vector<std::uint32_t> picked;
  sample_without_replacement(static_cast<std::uint32_t>(N), static_cast<std::uint32_t>(n), rng, picked);
  double sum = 0.0;
  for (auto i : picked) sum += frame.outcome()[i];
  return sum / static_cast<double>(n);
}

}  // namespace stratsel
