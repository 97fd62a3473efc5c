#include "capl/pseudo_label.hpp"

#include <cmath>

#include "common/error.hpp"

namespace ssal {

std::vector<MaybeClass> initial_pseudo_labels(const Tensor& probabilities, double tau) {
  require(tau > 0.0 && tau < 1.0, ErrorKind::config, "tau must lie in (0, 1)");
  const std::size_t n = probabilities.rows(), c = probabilities.cols();
  std::vector<MaybeClass> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0, best = -1.0;
    int best_class = 0;
    for (std::size_t j = 0; j < c; ++j) {
      const double p = probabilities.at(i, j);
      require(std::isfinite(p) && p >= 0.0 && p <= 1.0, ErrorKind::structural,
              "probability row " + std::to_string(i) + " has an entry outside [0,1]");
      total += p;
      if (p > best) {
        best = p;
        best_class = static_cast<int>(j);
      }
    }
    require(std::fabs(total - 1.0) < 1e-6, ErrorKind::structural,
            "probability row " + std::to_string(i) + " sums to " + std::to_string(total));
    if (best > tau) out[i] = best_class;
  }
  return out;
}

std::vector<MaybeClass> clustering_labels(const KMeansModel& model, const Tensor& features) {
  std::vector<MaybeClass> out(features.rows());
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const std::size_t c = nearest_centroid(model.centroids, features.values().subspan(i * features.cols(), features.cols()));
    out[i] = model.cluster_class[c];
  }
  return out;
}

MaybeClass agree(MaybeClass initial, MaybeClass clustering) {
  if (initial && clustering && *initial == *clustering) return initial;
  return std::nullopt;
}

std::vector<PseudoLabelRecord> build_pseudo_labels(std::span<const std::size_t> indices,
                                                   const Tensor& probabilities, double tau,
                                                   std::span<const MaybeClass> clustering, PseudoMode mode) {
  require(indices.size() == probabilities.rows(), ErrorKind::structural,
          "build_pseudo_labels: index count differs from probability rows");
  require(mode == PseudoMode::threshold || clustering.size() == indices.size(), ErrorKind::structural,
          "build_pseudo_labels: clustering labels missing for agreement mode");
  const std::vector<MaybeClass> initial = initial_pseudo_labels(probabilities, tau);
  std::vector<PseudoLabelRecord> out(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    PseudoLabelRecord& r = out[i];
    r.index = indices[i];
    r.initial = initial[i];
    for (std::size_t j = 0; j < probabilities.cols(); ++j) r.max_probability = std::max(r.max_probability, probabilities.at(i, j));
    if (!clustering.empty()) r.clustering = clustering[i];
    r.final_label = mode == PseudoMode::agreement ? agree(r.initial, r.clustering) : r.initial;
  }
  return out;
}

PseudoLabelStats pseudo_label_stats(std::span<const PseudoLabelRecord> records, std::span<const int> ground_truth) {
  PseudoLabelStats stats;
  std::size_t wrong = 0;
  for (const auto& r : records) {
    if (!r.final_label) continue;
    require(r.index < ground_truth.size(), ErrorKind::structural, "pseudo label index outside ground truth");
    ++stats.count;
    if (*r.final_label != ground_truth[r.index]) ++wrong;
  }
  if (stats.count == 0) {
    stats.undefined = true;
    return stats;
  }
  stats.error_rate = static_cast<double>(wrong) / static_cast<double>(stats.count);
  return stats;
}

}  // namespace ssal
