#ifndef STRATSEL_KMEANS_HPP_
#define STRATSEL_KMEANS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stratsel/frame.hpp"
#include "stratsel/rng.hpp"
#include "stratsel/stats.hpp"

namespace stratsel {

// Per-feature z-score parameters. Zero-variance features get scale 1.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;
};

struct KMeansOptions {
  double tolerance = 1e-6;  // max centroid displacement, standardized units
  int max_iterations = 300;
  int restarts = 1;
};

// A fitted stratifier. Centroids live in standardized space, row-major
// K x |features|.
struct StratumPartition {
  std::vector<std::size_t> features;
  Standardizer standardizer;
  std::vector<double> centroids;
  std::vector<Label> train_labels;
  int k = 0;
  std::uint64_t seed = 0;
  KMeansOptions options;
  int iterations = 0;
  bool converged = false;

  std::size_t dims() const { return features.size(); }
  std::span<const double> centroid(std::size_t c) const {
    return {centroids.data() + c * dims(), dims()};
  }
};

Standardizer fit_standardizer(const PopulationFrame& frame, std::span<const std::size_t> features);

// Standardized N x |features| design, row-major.
std::vector<double> standardize(const PopulationFrame& frame, std::span<const std::size_t> features,
                                const Standardizer& standardizer);

// Nearest centroid by squared Euclidean distance, ties to the lower index.
// Returns the label and writes the squared distance.
Label nearest_centroid(std::span<const double> point, std::span<const double> centroids,
                       std::size_t k, double* distance = nullptr);

// k-means++ seeding over n points of dimension d.
std::vector<double> kmeans_plus_plus(std::span<const double> points, std::size_t d, int k, Rng& rng);

struct LloydResult {
  std::vector<double> centroids;
  std::vector<Label> labels;
  int iterations = 0;
  bool converged = false;
  double wcss = 0.0;
  // WCSS after every assignment step, in order.
  std::vector<double> wcss_history;
};

// Lloyd iterations from the given initial centroids. Empty clusters are
// reseeded with the point farthest from its assigned centroid. The returned
// labels are the nearest-centroid assignment for the returned centroids.
LloydResult run_lloyd(std::span<const double> points, std::size_t d, std::vector<double> centroids,
                      const KMeansOptions& options);

StratumPartition kmeans_fit(const PopulationFrame& frame, std::vector<std::size_t> features, int k,
                            std::uint64_t seed, const KMeansOptions& options = {});

std::vector<Label> kmeans_assign(const StratumPartition& partition, const PopulationFrame& frame);

double wcss(const StratumPartition& partition, const PopulationFrame& frame);

}  // namespace stratsel

#endif  // STRATSEL_KMEANS_HPP_
