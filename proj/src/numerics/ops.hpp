#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "numerics/graph.hpp"

/// Differentiable primitives over 2-D tensors. Binary elementwise ops accept a
/// right operand that is the same shape as the left, a row [1, m], a column
/// [n, 1], or a scalar [1, 1]; the result always has the left operand's shape.
namespace ssal::ops {

/// Probabilities are clamped to [kProbFloor, 1 - kProbFloor] before any log.
inline constexpr double kProbFloor = 1e-7;

Var matmul(Var a, Var b);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double c);
Var add_scalar(Var a, double c);

Var relu(Var a);
Var sigmoid(Var a);
Var tanh(Var a);
Var exp(Var a);
Var log(Var a);
Var abs(Var a);
Var square(Var a);
/// Identity inside [lo, hi], constant outside; gradient is zero where clipped.
Var clamp(Var a, double lo, double hi);

Var softmax_rows(Var a);

Var sum(Var a);
Var mean(Var a);
/// Row-wise reductions over the feature dimension: [n, m] -> [n, 1].
Var sum_cols(Var a);
Var mean_cols(Var a);

Var concat_cols(std::span<const Var> parts);
Var slice_cols(Var a, std::size_t begin, std::size_t end);
Var slice_rows(Var a, std::size_t begin, std::size_t end);
/// Row-major reinterpretation with the same element count.
Var reshape(Var a, std::size_t rows, std::size_t cols);

/// Mean squared error over all elements.
Var mse(Var a, Var b);
/// Mean binary cross-entropy of probabilities `p` against targets in [0, 1].
Var bce(Var p, Var target);
/// Per-sample cross-entropy from logits, computed with a stable log-softmax: [n, c] -> [n, 1].
Var cross_entropy_per_sample(Var logits, std::span<const int> labels);

/// Copies the value into a new constant; no gradient flows back through it.
Var detach(Var a);

}  // namespace ssal::ops

namespace ssal::kernels {

/// Plain (non-differentiable) helpers shared by ops and model code.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor matmul_nt(const Tensor& a, const Tensor& b);  // a * b^T
Tensor matmul_tn(const Tensor& a, const Tensor& b);  // a^T * b
Tensor softmax_rows(const Tensor& logits);

}  // namespace ssal::kernels
