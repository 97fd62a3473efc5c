#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "numerics/tensor.hpp"

namespace ssal {

struct KMeansModel {
  Tensor centroids;  // [k, d]
  /// Class for each cluster; empty when no labeled point falls in it.
  std::vector<std::optional<int>> cluster_class;
  std::size_t iterations = 0;
  double inertia = 0.0;
  /// Inertia measured at every assignment step, in order.
  std::vector<double> inertia_history;
  /// Final assignment of the fitted points.
  std::vector<std::size_t> assignment;

  std::size_t k() const { return centroids.rows(); }
};

inline constexpr std::size_t kKMeansMaxIterations = 100;
inline constexpr double kKMeansTolerance = 1e-4;

/// k-means++ seeding followed by Lloyd iterations until the largest centroid
/// shift is below 1e-4 or 100 iterations have run. An empty cluster is moved
/// onto the point farthest from its assigned centroid.
KMeansModel kmeans_fit(const Tensor& features, std::size_t k, std::uint64_t seed);

/// Index of the nearest centroid; ties go to the lowest index.
std::size_t nearest_centroid(const Tensor& centroids, std::span<const double> point);

/// Maps every cluster that holds at least one labeled point to its majority
/// class (ties to the smallest class). Clusters without labeled members stay unmapped.
void map_clusters(KMeansModel& model, const Tensor& labeled_features, std::span<const int> labeled_classes);

}  // namespace ssal
