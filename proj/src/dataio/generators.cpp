#include "dataio/generators.hpp"

#include <cmath>
#include <numbers>

#include "common/error.hpp"
#include "numerics/rng.hpp"

namespace ssal {
namespace {

Dataset shuffled(Dataset data, Rng& rng) {
  const std::vector<std::size_t> perm = rng.permutation(data.size());
  return subset(data, perm);
}

}  // namespace

Dataset make_blobs(std::uint64_t seed, std::size_t n, std::size_t classes, std::size_t dim, double sigma) {
  require(n >= classes && classes >= 2 && dim >= 1, ErrorKind::config,
          "make_blobs needs n >= classes >= 2 and dim >= 1");
  require(sigma >= 0.0 && std::isfinite(sigma), ErrorKind::config, "make_blobs needs a finite sigma >= 0");
  Rng rng = Rng::derive(seed, "blobs");
  const double pi = std::numbers::pi;
  const double phase = rng.uniform(0.0, 2.0 * pi);
  Tensor centers = Tensor::matrix(classes, dim);
  for (std::size_t c = 0; c < classes; ++c) {
    if (dim == 1) {
      centers.at(c, 0) = 4.0 * static_cast<double>(c);
    } else {
      const double radius = 2.0 / std::sin(pi / static_cast<double>(classes));
      const double angle = phase + 2.0 * pi * static_cast<double>(c) / static_cast<double>(classes);
      centers.at(c, 0) = radius * std::cos(angle);
      centers.at(c, 1) = radius * std::sin(angle);
    }
  }
  Dataset data;
  data.name = "blobs";
  data.classes = classes;
  data.features = Tensor::matrix(n, dim);
  data.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % classes;
    data.labels[i] = static_cast<int>(c);
    for (std::size_t j = 0; j < dim; ++j) {
      data.features.at(i, j) = centers.at(c, j) + (sigma > 0.0 ? rng.normal(0.0, sigma) : 0.0);
    }
  }
  return shuffled(std::move(data), rng);
}

Dataset make_two_moons(std::uint64_t seed, std::size_t n, double noise) {
  require(n >= 2, ErrorKind::config, "make_two_moons needs n >= 2");
  require(noise >= 0.0 && std::isfinite(noise), ErrorKind::config, "make_two_moons needs a finite noise >= 0");
  Rng rng = Rng::derive(seed, "moons");
  const std::size_t outer = n / 2, inner = n - outer;
  const double pi = std::numbers::pi;
  Dataset data;
  data.name = "moons";
  data.classes = 2;
  data.features = Tensor::matrix(n, 2);
  data.labels.resize(n);
  auto angle = [pi](std::size_t i, std::size_t count) {
    return count > 1 ? pi * static_cast<double>(i) / static_cast<double>(count - 1) : 0.0;
  };
  for (std::size_t i = 0; i < outer; ++i) {
    const double t = angle(i, outer);
    data.features.at(i, 0) = std::cos(t);
    data.features.at(i, 1) = std::sin(t);
    data.labels[i] = 0;
  }
  for (std::size_t i = 0; i < inner; ++i) {
    const double t = angle(i, inner);
    data.features.at(outer + i, 0) = 1.0 - std::cos(t);
    data.features.at(outer + i, 1) = 0.5 - std::sin(t);
    data.labels[outer + i] = 1;
  }
  if (noise > 0.0) {
    for (double& v : data.features.values()) v += rng.normal(0.0, noise);
  }
  return shuffled(std::move(data), rng);
}

}  // namespace ssal
