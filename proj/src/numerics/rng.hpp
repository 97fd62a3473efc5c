#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "numerics/tensor.hpp"

namespace ssal {

/// Seeded random stream. Every stochastic component draws from its own
/// stream derived from the run seed and a tag, so adding draws in one
/// component never shifts another.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent stream for (seed, tag, index).
  static Rng derive(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0);

  double uniform();  // [0, 1)
  double uniform(double lo, double hi);
  double normal(double mean = 0.0, double stddev = 1.0);
  std::size_t index(std::size_t n);  // uniform in [0, n)
  std::uint64_t next_u64() { return engine_(); }

  Tensor normal_tensor(const Shape& shape, double stddev = 1.0);
  std::vector<std::size_t> permutation(std::size_t n);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ssal
