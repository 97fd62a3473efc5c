#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "capl/kmeans.hpp"

namespace ssal {

using MaybeClass = std::optional<int>;

struct PseudoLabelRecord {
  std::size_t index = 0;  // dataset index of the unlabeled sample
  MaybeClass initial;     // IPL
  MaybeClass clustering;  // CL
  MaybeClass final_label;
  double max_probability = 0.0;
};

/// IPL: argmax class when its probability is strictly greater than tau.
std::vector<MaybeClass> initial_pseudo_labels(const Tensor& probabilities, double tau);

/// CL: class mapped to the nearest centroid, or nothing for an unmapped cluster.
std::vector<MaybeClass> clustering_labels(const KMeansModel& model, const Tensor& features);

/// Final label only when both labels exist and agree.
MaybeClass agree(MaybeClass initial, MaybeClass clustering);

enum class PseudoMode {
  agreement,  // IPL intersected with CL
  threshold,  // IPL alone (conventional pseudo labeling)
};

/// Builds one record per row. `clustering` may be empty for threshold mode.
std::vector<PseudoLabelRecord> build_pseudo_labels(std::span<const std::size_t> indices,
                                                   const Tensor& probabilities, double tau,
                                                   std::span<const MaybeClass> clustering, PseudoMode mode);

struct PseudoLabelStats {
  std::size_t count = 0;
  double error_rate = 0.0;
  bool undefined = false;  // no final labels: error_rate is reported as 0
};

/// Error rate of final labels against `ground_truth`, indexed by dataset index.
PseudoLabelStats pseudo_label_stats(std::span<const PseudoLabelRecord> records, std::span<const int> ground_truth);

}  // namespace ssal
