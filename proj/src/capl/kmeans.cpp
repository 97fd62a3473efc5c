#include "capl/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "common/error.hpp"
#include "numerics/rng.hpp"

namespace ssal {
namespace {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

std::span<const double> row(const Tensor& t, std::size_t i) { return t.values().subspan(i * t.cols(), t.cols()); }

void set_row(Tensor& t, std::size_t i, std::span<const double> values) {
  std::copy(values.begin(), values.end(), t.data() + i * t.cols());
}

Tensor plus_plus_seeds(const Tensor& x, std::size_t k, Rng& rng) {
  const std::size_t n = x.rows(), d = x.cols();
  Tensor centroids = Tensor::matrix(k, d);
  set_row(centroids, 0, row(x, rng.index(n)));
  std::vector<double> closest(n, std::numeric_limits<double>::infinity());
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      closest[i] = std::min(closest[i], squared_distance(row(x, i), row(centroids, c - 1)));
      total += closest[i];
    }
    std::size_t pick = 0;
    if (total <= 0.0) {
      pick = rng.index(n);
    } else {
      double target = rng.uniform() * total;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        target -= closest[i];
        if (target < 0.0) {
          pick = i;
          break;
        }
      }
    }
    set_row(centroids, c, row(x, pick));
  }
  return centroids;
}

/// Assigns all points; returns the inertia and fills per-point distances.
double assign(const Tensor& x, const Tensor& centroids, std::vector<std::size_t>& assignment,
              std::vector<double>& distance) {
  double inertia = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    assignment[i] = nearest_centroid(centroids, row(x, i));
    distance[i] = squared_distance(row(x, i), row(centroids, assignment[i]));
    inertia += distance[i];
  }
  return inertia;
}

}  // namespace

std::size_t nearest_centroid(const Tensor& centroids, std::span<const double> point) {
  require(point.size() == centroids.cols(), ErrorKind::structural,
          "point of width " + std::to_string(point.size()) + " vs centroids of width " +
              std::to_string(centroids.cols()));
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.rows(); ++c) {
    const double d = squared_distance(point, row(centroids, c));
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

KMeansModel kmeans_fit(const Tensor& features, std::size_t k, std::uint64_t seed) {
  const std::size_t n = features.rows(), d = features.cols();
  require(k >= 1, ErrorKind::structural, "kmeans needs k >= 1");
  require(n >= k, ErrorKind::structural,
          "kmeans needs at least k=" + std::to_string(k) + " samples, got " + std::to_string(n));
  require(features.all_finite(), ErrorKind::numeric, "kmeans: non-finite features");

  Rng rng = Rng::derive(seed, "kmeans");
  KMeansModel model;
  model.centroids = plus_plus_seeds(features, k, rng);
  model.cluster_class.assign(k, std::nullopt);
  std::vector<std::size_t> assignment(n);
  std::vector<double> distance(n);

  for (std::size_t iter = 0; iter < kKMeansMaxIterations; ++iter) {
    model.inertia_history.push_back(assign(features, model.centroids, assignment, distance));
    ++model.iterations;

    Tensor next = Tensor::matrix(k, d);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[assignment[i]];
      for (std::size_t j = 0; j < d; ++j) next.at(assignment[i], j) += features.at(i, j);
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) {
        for (std::size_t j = 0; j < d; ++j) next.at(c, j) /= static_cast<double>(counts[c]);
        continue;
      }
      const auto far = std::max_element(distance.begin(), distance.end());
      const std::size_t idx = static_cast<std::size_t>(far - distance.begin());
      set_row(next, c, row(features, idx));
      *far = 0.0;
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      shift = std::max(shift, std::sqrt(squared_distance(row(next, c), row(model.centroids, c))));
    }
    model.centroids = std::move(next);
    if (shift < kKMeansTolerance) break;
  }
  model.inertia = assign(features, model.centroids, assignment, distance);
  model.assignment = std::move(assignment);
  return model;
}

void map_clusters(KMeansModel& model, const Tensor& labeled_features, std::span<const int> labeled_classes) {
  require(labeled_features.rows() == labeled_classes.size(), ErrorKind::structural,
          "map_clusters: features and classes differ in length");
  std::vector<std::map<int, std::size_t>> votes(model.k());
  for (std::size_t i = 0; i < labeled_classes.size(); ++i) {
    ++votes[nearest_centroid(model.centroids, row(labeled_features, i))][labeled_classes[i]];
  }
  model.cluster_class.assign(model.k(), std::nullopt);
  for (std::size_t c = 0; c < model.k(); ++c) {
    std::size_t best = 0;
    for (const auto& [cls, count] : votes[c]) {
      if (count > best) {  // std::map iterates classes ascending, so ties keep the smaller class
        best = count;
        model.cluster_class[c] = cls;
      }
    }
  }
}

}  // namespace ssal
