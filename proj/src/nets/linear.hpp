#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "numerics/graph.hpp"
#include "numerics/rng.hpp"

namespace ssal {

enum class Init {
  he,    // weights ~ N(0, 2 / fan_in), bias 0
  zero,  // weights and bias 0
};

/// Affine map x * W + b with W of shape [in, out].
class Linear {
 public:
  Linear() = default;
  Linear(const std::string& name, std::size_t in, std::size_t out, Rng& rng, Init init = Init::he);

  Var forward(Graph& g, Var x);

  std::size_t in_features() const { return weight.value.rows(); }
  std::size_t out_features() const { return weight.value.cols(); }
  void collect(std::vector<Parameter*>& out) {
    out.push_back(&weight);
    out.push_back(&bias);
  }

  Parameter weight;
  Parameter bias;
};

}  // namespace ssal
