#pragma once

#include <functional>
#include <span>

#include "numerics/graph.hpp"

namespace ssal {

/// Max over coordinates of |analytic - central| / max(1e-8, |analytic| + |central|)
/// for a scalar function of a single input tensor.
double grad_check(const std::function<Var(Graph&, Var)>& f, const Tensor& point, double h = 1e-5);

/// Same measure with respect to every element of `params`; `f` builds the
/// scalar loss on a fresh graph each call.
double grad_check_params(const std::function<Var(Graph&)>& f, std::span<Parameter* const> params,
                         double h = 1e-5);

}  // namespace ssal
