#include "nets/linear.hpp"

#include <cmath>

#include "common/error.hpp"
#include "numerics/ops.hpp"

namespace ssal {

Linear::Linear(const std::string& name, std::size_t in, std::size_t out, Rng& rng, Init init)
    : weight(name + ".weight", Tensor::matrix(in, out)), bias(name + ".bias", Tensor::matrix(1, out)) {
  if (init == Init::he) {
    weight.value = rng.normal_tensor({in, out}, std::sqrt(2.0 / static_cast<double>(in)));
  }
}

Var Linear::forward(Graph& g, Var x) {
  require(x.cols() == in_features(), ErrorKind::structural,
          weight.name + ": expected input width " + std::to_string(in_features()) + ", got " +
              std::to_string(x.cols()));
  return ops::add(ops::matmul(x, g.parameter(weight)), g.parameter(bias));
}

}  // namespace ssal
