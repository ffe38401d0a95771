#include "stratsel/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "stratsel/error.hpp"

namespace stratsel {

namespace {

void check_features(const PopulationFrame& frame, std::span<const std::size_t> features) {
  require(!features.empty(), ErrorCode::kBadFeatureIndex, "empty feature subset");
  std::set<std::size_t> seen;
  for (std::size_t f : features) {
    require(f < frame.cols(), ErrorCode::kBadFeatureIndex,
            "feature index " + std::to_string(f) + " outside [0, " + std::to_string(frame.cols()) + ")");
    require(seen.insert(f).second, ErrorCode::kBadFeatureIndex,
            "duplicate feature index " + std::to_string(f));
  }
}

double squared_distance(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

}  // namespace

Standardizer fit_standardizer(const PopulationFrame& frame, std::span<const std::size_t> features) {
  Standardizer s;
  const auto n = static_cast<double>(frame.rows());
  for (std::size_t f : features) {
    double mean = 0.0;
    for (std::size_t i = 0; i < frame.rows(); ++i) mean += frame.covariate(i, f);
    mean /= n;
    double ss = 0.0;
    for (std::size_t i = 0; i < frame.rows(); ++i) {
      const double d = frame.covariate(i, f) - mean;
      ss += d * d;
    }
    double scale = std::sqrt(ss / n);
    // Rounding in the mean leaves constant columns with a tiny residual spread.
    if (!(scale > 1e-12 * std::max(1.0, std::abs(mean)))) scale = 1.0;
    s.mean.push_back(mean);
    s.scale.push_back(scale);
  }
  return s;
}

std::vector<double> standardize(const PopulationFrame& frame, std::span<const std::size_t> features,
                                const Standardizer& standardizer) {
  const std::size_t d = features.size();
  std::vector<double> out(frame.rows() * d);
  for (std::size_t i = 0; i < frame.rows(); ++i)
    for (std::size_t j = 0; j < d; ++j)
      out[i * d + j] = (frame.covariate(i, features[j]) - standardizer.mean[j]) / standardizer.scale[j];
  return out;
}

Label nearest_centroid(std::span<const double> point, std::span<const double> centroids,
                       std::size_t k, double* distance) {
  const std::size_t d = point.size();
  Label best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < k; ++c) {
    const double dist = squared_distance(point.data(), centroids.data() + c * d, d);
    if (dist < best_dist) {
      best_dist = dist;
      best = static_cast<Label>(c);
    }
  }
  if (distance) *distance = best_dist;
  return best;
}

std::vector<double> kmeans_plus_plus(std::span<const double> points, std::size_t d, int k, Rng& rng) {
  const std::size_t n = points.size() / d;
  std::vector<double> centroids;
  centroids.reserve(static_cast<std::size_t>(k) * d);
  auto push_point = [&](std::size_t i) {
    centroids.insert(centroids.end(), points.begin() + static_cast<std::ptrdiff_t>(i * d),
                     points.begin() + static_cast<std::ptrdiff_t>((i + 1) * d));
  };
  push_point(uniform_below(rng, n));
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(&points[i * d], centroids.data(), d);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t chosen = n - 1;
    if (total > 0.0) {
      const double target = uniform_unit(rng) * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc > target && d2[i] > 0.0) {
          chosen = i;
          break;
        }
      }
      // Rounding can leave the target past the last positive weight.
      while (d2[chosen] == 0.0 && chosen > 0) --chosen;
    } else {
      chosen = uniform_below(rng, n);
    }
    push_point(chosen);
    const double* newest = centroids.data() + static_cast<std::size_t>(c) * d;
    for (std::size_t i = 0; i < n; ++i)
      d2[i] = std::min(d2[i], squared_distance(&points[i * d], newest, d));
  }
  return centroids;
}

namespace {

double assign_all(std::span<const double> points, std::size_t d, std::span<const double> centroids,
                  std::size_t k, std::vector<Label>& labels, std::vector<double>& dist) {
  const std::size_t n = points.size() / d;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    labels[i] = nearest_centroid(points.subspan(i * d, d), centroids, k, &dist[i]);
    total += dist[i];
  }
  return total;
}

// Moves the farthest point from a multi-member cluster into each empty
// cluster. Returns the updated WCSS.
double repair_empty(std::span<const double> points, std::size_t d, std::vector<double>& centroids,
                    std::size_t k, std::vector<Label>& labels, std::vector<double>& dist,
                    double wcss) {
  const std::size_t n = labels.size();
  std::vector<std::size_t> counts(k, 0);
  for (Label l : labels) ++counts[static_cast<std::size_t>(l)];
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] != 0) continue;
    std::size_t far = n;
    double far_dist = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (counts[static_cast<std::size_t>(labels[i])] > 1 && dist[i] > far_dist) {
        far_dist = dist[i];
        far = i;
      }
    }
    if (far == n) break;  // every cluster is a singleton already
    --counts[static_cast<std::size_t>(labels[far])];
    labels[far] = static_cast<Label>(c);
    ++counts[c];
    std::copy_n(points.begin() + static_cast<std::ptrdiff_t>(far * d), d,
                centroids.begin() + static_cast<std::ptrdiff_t>(c * d));
    wcss -= dist[far];
    dist[far] = 0.0;
  }
  return wcss;
}

}  // namespace

LloydResult run_lloyd(std::span<const double> points, std::size_t d, std::vector<double> centroids,
                      const KMeansOptions& options) {
  const std::size_t n = points.size() / d;
  const std::size_t k = centroids.size() / d;
  LloydResult r;
  r.labels.assign(n, 0);
  std::vector<double> dist(n);
  std::vector<double> sums(k * d);
  std::vector<std::size_t> counts(k);

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    double w = assign_all(points, d, centroids, k, r.labels, dist);
    w = repair_empty(points, d, centroids, k, r.labels, dist, w);
    r.wcss_history.push_back(w);

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(r.labels[i]);
      ++counts[c];
      for (std::size_t j = 0; j < d; ++j) sums[c * d + j] += points[i * d + j];
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;  // only when fewer distinct points than K
      double moved = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double updated = sums[c * d + j] / static_cast<double>(counts[c]);
        const double delta = updated - centroids[c * d + j];
        moved += delta * delta;
        centroids[c * d + j] = updated;
      }
      shift = std::max(shift, std::sqrt(moved));
    }
    r.iterations = iter + 1;
    if (shift < options.tolerance) {
      r.converged = true;
      break;
    }
  }
  r.wcss = assign_all(points, d, centroids, k, r.labels, dist);
  r.wcss_history.push_back(r.wcss);
  r.centroids = std::move(centroids);
  return r;
}

StratumPartition kmeans_fit(const PopulationFrame& frame, std::vector<std::size_t> features, int k,
                            std::uint64_t seed, const KMeansOptions& options) {
  check_features(frame, features);
  require(k >= 1 && static_cast<std::size_t>(k) <= frame.rows(), ErrorCode::kKExceedsPopulation,
          "K=" + std::to_string(k) + " must lie in [1, N=" + std::to_string(frame.rows()) + "]");
  require(options.max_iterations >= 1 && options.restarts >= 1 && options.tolerance >= 0.0,
          ErrorCode::kBadConfig, "invalid K-means options");

  StratumPartition p;
  p.features = std::move(features);
  p.k = k;
  p.seed = seed;
  p.options = options;
  p.standardizer = fit_standardizer(frame, p.features);
  const auto points = standardize(frame, p.features, p.standardizer);
  const std::size_t d = p.dims();

  LloydResult best;
  bool have_best = false;
  for (int restart = 0; restart < options.restarts; ++restart) {
    Rng rng = make_rng(options.restarts == 1 ? seed
                                             : derive_seed(seed, {static_cast<std::uint64_t>(restart)}));
    auto init = kmeans_plus_plus(points, d, k, rng);
    auto result = run_lloyd(points, d, std::move(init), options);
    if (!have_best || result.wcss < best.wcss) {
      best = std::move(result);
      have_best = true;
    }
  }
  p.centroids = std::move(best.centroids);
  p.train_labels = std::move(best.labels);
  p.iterations = best.iterations;
  p.converged = best.converged;
  return p;
}

namespace {

void check_partition_frame(const StratumPartition& partition, const PopulationFrame& frame) {
  for (std::size_t f : partition.features)
    require(f < frame.cols(), ErrorCode::kBadFeatureIndex,
            "partition feature " + std::to_string(f) + " not in frame");
}

}  // namespace

std::vector<Label> kmeans_assign(const StratumPartition& partition, const PopulationFrame& frame) {
  check_partition_frame(partition, frame);
  const auto points = standardize(frame, partition.features, partition.standardizer);
  const std::size_t d = partition.dims();
  std::vector<Label> labels(frame.rows());
  for (std::size_t i = 0; i < frame.rows(); ++i)
    labels[i] = nearest_centroid(std::span<const double>(points).subspan(i * d, d),
                                 partition.centroids, static_cast<std::size_t>(partition.k));
  return labels;
}

double wcss(const StratumPartition& partition, const PopulationFrame& frame) {
  check_partition_frame(partition, frame);
  const auto points = standardize(frame, partition.features, partition.standardizer);
  const std::size_t d = partition.dims();
  double total = 0.0;
  for (std::size_t i = 0; i < frame.rows(); ++i) {
    double dist = 0.0;
    nearest_centroid(std::span<const double>(points).subspan(i * d, d), partition.centroids,
                     static_cast<std::size_t>(partition.k), &dist);
    total += dist;
  }
  return total;
}

}  // namespace stratsel
