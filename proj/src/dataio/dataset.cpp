#include "dataio/dataset.hpp"

#include <cmath>

#include "common/error.hpp"
#include "numerics/rng.hpp"

namespace ssal {

void Dataset::validate() const {
  require(features.rows() == labels.size(), ErrorKind::format,
          name + ": " + std::to_string(features.rows()) + " feature rows but " + std::to_string(labels.size()) +
              " labels");
  require(features.all_finite(), ErrorKind::format, name + ": non-finite feature value");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    require(labels[i] >= 0 && static_cast<std::size_t>(labels[i]) < classes, ErrorKind::format,
            name + ": label " + std::to_string(labels[i]) + " at row " + std::to_string(i) + " outside [0," +
                std::to_string(classes) + ")");
  }
}

void normalize(Dataset& data) {
  require(!data.normalization.applied, ErrorKind::config, data.name + " is already normalized");
  const std::size_t n = data.size(), d = data.dim();
  require(n > 0, ErrorKind::config, data.name + ": cannot normalize an empty dataset");
  Normalization norm{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0), true};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) norm.mean[j] += data.features.at(i, j);
  for (double& m : norm.mean) m /= static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double c = data.features.at(i, j) - norm.mean[j];
      norm.stddev[j] += c * c;
    }
  for (double& s : norm.stddev) s = std::sqrt(s / static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double scale = norm.stddev[j] > 0.0 ? norm.stddev[j] : 1.0;
      data.features.at(i, j) = (data.features.at(i, j) - norm.mean[j]) / scale;
    }
  data.normalization = std::move(norm);
}

Dataset subset(const Dataset& data, std::span<const std::size_t> indices) {
  Dataset out;
  out.name = data.name;
  out.classes = data.classes;
  out.normalization = data.normalization;
  out.features = gather_rows(data.features, indices);
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) out.labels.push_back(data.labels[i]);
  return out;
}

TrainTestSplit train_test_split(const Dataset& data, double test_fraction, std::uint64_t seed) {
  require(test_fraction > 0.0 && test_fraction < 1.0, ErrorKind::config, "test_fraction must lie in (0, 1)");
  const std::size_t n = data.size();
  const auto test_n = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
  require(test_n >= 1 && test_n < n, ErrorKind::config,
          "test_fraction leaves an empty train or test split for " + std::to_string(n) + " samples");
  Rng rng = Rng::derive(seed, "split");
  const std::vector<std::size_t> perm = rng.permutation(n);
  const std::span<const std::size_t> all(perm);
  return {subset(data, all.subspan(test_n)), subset(data, all.first(test_n))};
}

}  // namespace ssal
