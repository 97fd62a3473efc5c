#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "numerics/tensor.hpp"

namespace ssal {

struct Normalization {
  std::vector<double> mean;
  std::vector<double> stddev;
  bool applied = false;
};

struct Dataset {
  std::string name;
  Tensor features;  // [n, d]
  std::vector<int> labels;
  std::size_t classes = 0;
  Normalization normalization;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return features.cols(); }

  /// Labels in [0, classes), features finite, row count matches labels.
  void validate() const;
};

/// Per-feature standardization over the whole dataset. A zero-variance
/// feature is only centered. Normalizing twice is a config error.
void normalize(Dataset& data);

Dataset subset(const Dataset& data, std::span<const std::size_t> indices);

struct TrainTestSplit {
  Dataset train;
  Dataset test;
};

/// Shuffled split; the test part holds round(n * test_fraction) samples.
TrainTestSplit train_test_split(const Dataset& data, double test_fraction, std::uint64_t seed);

}  // namespace ssal
