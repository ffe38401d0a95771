#include "stratsel/stats.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "stratsel/error.hpp"

namespace stratsel {

std::int64_t StratumStats::population() const {
  return std::accumulate(sizes.begin(), sizes.end(), std::int64_t{0});
}

StratumStats StratumStats::from_moments(std::vector<std::int64_t> sizes,
                                        std::vector<double> means,
                                        std::vector<double> variances) {
  require(!sizes.empty(), ErrorCode::kPrecondition, "no strata");
  require(sizes.size() == means.size() && sizes.size() == variances.size(),
          ErrorCode::kLengthMismatch, "sizes/means/variances differ in length");
  StratumStats s;
  s.sizes = std::move(sizes);
  s.means = std::move(means);
  s.variances = std::move(variances);
  double total = 0.0;
  double weighted = 0.0;
  for (std::size_t k = 0; k < s.sizes.size(); ++k) {
    require(s.sizes[k] >= 1, ErrorCode::kPrecondition, "stratum sizes must be positive");
    require(s.variances[k] >= 0.0, ErrorCode::kPrecondition, "negative stratum variance");
    total += static_cast<double>(s.sizes[k]);
    weighted += static_cast<double>(s.sizes[k]) * s.means[k];
  }
  s.overall_mean = weighted / total;
  double var = 0.0;
  for (std::size_t k = 0; k < s.sizes.size(); ++k) {
    const double d = s.means[k] - s.overall_mean;
    var += static_cast<double>(s.sizes[k]) * (s.variances[k] + d * d);
  }
  s.overall_variance = var / total;
  s.labels.resize(s.sizes.size());
  std::iota(s.labels.begin(), s.labels.end(), Label{0});
  return s;
}

int StratumStats::index_of(Label label) const {
  auto it = std::lower_bound(labels.begin(), labels.end(), label);
  if (it == labels.end() || *it != label) return -1;
  return static_cast<int>(it - labels.begin());
}

StratumStats stratum_stats(std::span<const double> outcome, std::span<const Label> labels) {
  require(outcome.size() == labels.size(), ErrorCode::kLengthMismatch,
          "labels and outcome differ in length");
  require(!outcome.empty(), ErrorCode::kEmptyTable, "no units");

  std::map<Label, std::size_t> index;
  for (Label l : labels) {
    require(l >= 0, ErrorCode::kPrecondition, "negative stratum label");
    index.emplace(l, 0);
  }
  StratumStats s;
  for (auto& [label, k] : index) {
    k = s.labels.size();
    s.labels.push_back(label);
  }
  const std::size_t K = s.labels.size();
  s.sizes.assign(K, 0);
  s.means.assign(K, 0.0);
  s.variances.assign(K, 0.0);

  // Dense lookup when labels are small, which is the K-means case.
  const auto max_label = static_cast<std::size_t>(s.labels.back());
  const bool use_dense = max_label <= 4 * outcome.size() + 1024;
  std::vector<std::size_t> dense(use_dense ? max_label + 1 : 0);
  for (std::size_t k = 0; use_dense && k < K; ++k) dense[static_cast<std::size_t>(s.labels[k])] = k;
  auto stratum_of = [&](Label l) {
    return use_dense ? dense[static_cast<std::size_t>(l)] : index.at(l);
  };

  for (std::size_t i = 0; i < outcome.size(); ++i) {
    const std::size_t k = stratum_of(labels[i]);
    ++s.sizes[k];
    s.means[k] += outcome[i];
  }
  for (std::size_t k = 0; k < K; ++k) s.means[k] /= static_cast<double>(s.sizes[k]);
  for (std::size_t i = 0; i < outcome.size(); ++i) {
    const std::size_t k = stratum_of(labels[i]);
    const double d = outcome[i] - s.means[k];
    s.variances[k] += d * d;
  }
  for (std::size_t k = 0; k < K; ++k) s.variances[k] /= static_cast<double>(s.sizes[k]);

  s.overall_mean = mean_of(outcome);
  s.overall_variance = population_variance(outcome);
  return s;
}

StratumStats stratum_stats(const PopulationFrame& frame, std::span<const Label> labels) {
  return stratum_stats(frame.outcome(), labels);
}

std::vector<Label> compact_labels(const StratumStats& stats, std::span<const Label> labels) {
  std::vector<Label> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const int k = stats.index_of(labels[i]);
    require(k >= 0, ErrorCode::kPrecondition, "label not present in stratum stats");
    out[i] = k;
  }
  return out;
}

double mean_of(std::span<const double> values) {
  if (values.empty()) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double population_variance(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double m = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return ss / static_cast<double>(values.size());
}

}  // namespace stratsel
