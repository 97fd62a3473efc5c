#include "numerics/ops.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>

#include "common/error.hpp"

namespace ssal::kernels {
namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMat>;
using MutMap = Eigen::Map<RowMat>;

ConstMap view(const Tensor& t) {
  return ConstMap(t.data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols()));
}
MutMap view(Tensor& t) {
  return MutMap(t.data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols()));
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require(a.cols() == b.rows(), ErrorKind::structural,
          "matmul shape mismatch " + shape_string(a.shape()) + " x " + shape_string(b.shape()));
  Tensor out = Tensor::matrix(a.rows(), b.cols());
  if (out.size()) view(out).noalias() = view(a) * view(b);
  return out;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  Tensor out = Tensor::matrix(a.rows(), b.rows());
  if (out.size()) view(out).noalias() = view(a) * view(b).transpose();
  return out;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
  Tensor out = Tensor::matrix(a.cols(), b.cols());
  if (out.size()) view(out).noalias() = view(a).transpose() * view(b);
  return out;
}

Tensor softmax_rows(const Tensor& logits) {
  Tensor out(logits.shape());
  const std::size_t n = logits.rows(), m = logits.cols();
  for (std::size_t i = 0; i < n; ++i) {
    double mx = logits.at(i, 0);
    for (std::size_t j = 1; j < m; ++j) mx = std::max(mx, logits.at(i, j));
    double z = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      out.at(i, j) = std::exp(logits.at(i, j) - mx);
      z += out.at(i, j);
    }
    for (std::size_t j = 0; j < m; ++j) out.at(i, j) /= z;
  }
  return out;
}

}  // namespace ssal::kernels

namespace ssal::ops {
namespace {

void require_matrix(const Var& v, const char* op) {
  require(v.graph != nullptr, ErrorKind::structural, std::string(op) + ": unbound variable");
  require(v.shape().size() == 2, ErrorKind::structural,
          std::string(op) + ": expected a matrix, got shape " + shape_string(v.shape()));
}

void require_same_graph(const Var& a, const Var& b, const char* op) {
  require(a.graph == b.graph, ErrorKind::structural, std::string(op) + ": operands on different graphs");
}

enum class Broadcast { same, row, col, scalar };

Broadcast classify(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() == b.shape()) return Broadcast::same;
  if (b.rows() == 1 && b.cols() == 1) return Broadcast::scalar;
  if (b.rows() == 1 && b.cols() == a.cols()) return Broadcast::row;
  if (b.cols() == 1 && b.rows() == a.rows()) return Broadcast::col;
  fail(ErrorKind::structural, std::string(op) + ": cannot broadcast " + shape_string(b.shape()) +
                                  " onto " + shape_string(a.shape()));
}

inline std::size_t bindex(Broadcast mode, std::size_t i, std::size_t j, std::size_t m) {
  switch (mode) {
    case Broadcast::same: return i * m + j;
    case Broadcast::row: return j;
    case Broadcast::col: return i;
    case Broadcast::scalar: return 0;
  }
  return 0;
}

template <class Fwd, class DA, class DB>
Var binary(const char* name, Var a, Var b, Fwd fwd, DA da, DB db) {
  require_matrix(a, name);
  require_matrix(b, name);
  require_same_graph(a, b, name);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  const Broadcast mode = classify(av, bv, name);
  const std::size_t n = av.rows(), m = av.cols();
  Tensor out(av.shape());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out[i * m + j] = fwd(av[i * m + j], bv[bindex(mode, i, j, m)]);

  const std::size_t ia = a.id, ib = b.id;
  return a.graph->emit(name, {ia, ib}, std::move(out), [=](Graph& g, std::size_t self) {
    const Tensor& go = g.grad(self);
    const Tensor& x = g.value(ia);
    const Tensor& y = g.value(ib);
    if (g.needs_grad(ia)) {
      Tensor& ga = g.grad_buffer(ia);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          const std::size_t k = i * m + j;
          ga[k] += go[k] * da(x[k], y[bindex(mode, i, j, m)]);
        }
    }
    if (g.needs_grad(ib)) {
      Tensor& gb = g.grad_buffer(ib);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          const std::size_t k = i * m + j;
          const std::size_t kb = bindex(mode, i, j, m);
          gb[kb] += go[k] * db(x[k], y[kb]);
        }
    }
  });
}

/// Elementwise unary op; `deriv(x, y)` gives dy/dx from input x and output y.
template <class Fwd, class Deriv>
Var unary(const char* name, Var a, Fwd fwd, Deriv deriv) {
  require_matrix(a, name);
  const Tensor& av = a.value();
  Tensor out(av.shape());
  for (std::size_t k = 0; k < av.size(); ++k) out[k] = fwd(av[k]);
  const std::size_t ia = a.id;
  return a.graph->emit(name, {ia}, std::move(out), [=](Graph& g, std::size_t self) {
    const Tensor& go = g.grad(self);
    const Tensor& x = g.value(ia);
    const Tensor& y = g.value(self);
    Tensor& ga = g.grad_buffer(ia);
    for (std::size_t k = 0; k < go.size(); ++k) ga[k] += go[k] * deriv(x[k], y[k]);
  });
}

}  // namespace

Var matmul(Var a, Var b) {
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  require_same_graph(a, b, "matmul");
  Tensor out = kernels::matmul(a.value(), b.value());
  const std::size_t ia = a.id, ib = b.id;
  return a.graph->emit("matmul", {ia, ib}, std::move(out), [=](Graph& g, std::size_t self) {
    const Tensor& go = g.grad(self);
    if (g.needs_grad(ia)) g.accumulate(ia, kernels::matmul_nt(go, g.value(ib)));
    if (g.needs_grad(ib)) g.accumulate(ib, kernels::matmul_tn(g.value(ia), go));
  });
}

Var add(Var a, Var b) {
  return binary(
      "add", a, b, [](double x, double y) { return x + y; }, [](double, double) { return 1.0; },
      [](double, double) { return 1.0; });
}

Var sub(Var a, Var b) {
  return binary(
      "sub", a, b, [](double x, double y) { return x - y; }, [](double, double) { return 1.0; },
      [](double, double) { return -1.0; });
}

Var mul(Var a, Var b) {
  return binary(
      "mul", a, b, [](double x, double y) { return x * y; }, [](double, double y) { return y; },
      [](double x, double) { return x; });
}

Var scale(Var a, double c) {
  return unary(
      "scale", a, [c](double x) { return c * x; }, [c](double, double) { return c; });
}

Var add_scalar(Var a, double c) {
  return unary(
      "add_scalar", a, [c](double x) { return x + c; }, [](double, double) { return 1.0; });
}

Var relu(Var a) {
  return unary(
      "relu", a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var sigmoid(Var a) {
  return unary(
      "sigmoid", a,
      [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var tanh(Var a) {
  return unary(
      "tanh", a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Var exp(Var a) {
  return unary(
      "exp", a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Var log(Var a) {
  require_matrix(a, "log");
  for (double v : a.value().values()) {
    require(v > 0.0, ErrorKind::numeric,
            "log of non-positive value at node #" + std::to_string(a.graph->size()));
  }
  return unary(
      "log", a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Var abs(Var a) {
  return unary(
      "abs", a, [](double x) { return std::fabs(x); },
      [](double x, double) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
}

Var square(Var a) {
  return unary(
      "square", a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Var clamp(Var a, double lo, double hi) {
  return unary(
      "clamp", a, [=](double x) { return std::clamp(x, lo, hi); },
      [=](double x, double) { return (x >= lo && x <= hi) ? 1.0 : 0.0; });
}

Var softmax_rows(Var a) {
  require_matrix(a, "softmax_rows");
  Tensor out = kernels::softmax_rows(a.value());
  const std::size_t ia = a.id;
  return a.graph->emit("softmax_rows", {ia}, std::move(out), [=](Graph& g, std::size_t self) {
    const Tensor& go = g.grad(self);
    const Tensor& y = g.value(self);
    Tensor& ga = g.grad_buffer(ia);
    const std::size_t n = y.rows(), m = y.cols();
    for (std::size_t i = 0; i < n; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < m; ++j) dot += go.at(i, j) * y.at(i, j);
      for (std::size_t j = 0; j < m; ++j) ga.at(i, j) += y.at(i, j) * (go.at(i, j) - dot);
    }
  });
}

Var sum(Var a) {
  require_matrix(a, "sum");
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  const std::size_t ia = a.id;
  return a.graph->emit("sum", {ia}, Tensor::scalar(s), [=](Graph& g, std::size_t self) {
    const double go = g.grad(self)[0];
    Tensor& ga = g.grad_buffer(ia);
    for (std::size_t k = 0; k < ga.size(); ++k) ga[k] += go;
  });
}

Var mean(Var a) {
  require_matrix(a, "mean");
  const std::size_t count = a.value().size();
  require(count > 0, ErrorKind::structural, "mean of empty tensor");
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  const std::size_t ia = a.id;
  return a.graph->emit("mean", {ia}, Tensor::scalar(s / static_cast<double>(count)),
                       [=](Graph& g, std::size_t self) {
                         const double go = g.grad(self)[0] / static_cast<double>(count);
                         Tensor& ga = g.grad_buffer(ia);
                         for (std::size_t k = 0; k < ga.size(); ++k) ga[k] += go;
                       });
}

namespace {

Var reduce_cols(const char* name, Var a, double factor) {
  require_matrix(a, name);
  const Tensor& av = a.value();
  const std::size_t n = av.rows(), m = av.cols();
  require(m > 0, ErrorKind::structural, std::string(name) + " of zero-width tensor");
  Tensor out = Tensor::matrix(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += av.at(i, j);
    out[i] = s * factor;
  }
  const std::size_t ia = a.id;
  return a.graph->emit(name, {ia}, std::move(out), [=](Graph& g, std::size_t self) {
    const Tensor& go = g.grad(self);
    Tensor& ga = g.grad_buffer(ia);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) ga.at(i, j) += go[i] * factor;
  });
}

}  // namespace

Var sum_cols(Var a) { return reduce_cols("sum_cols", a, 1.0); }

Var mean_cols(Var a) {
  require_matrix(a, "mean_cols");
  return reduce_cols("mean_cols", a, 1.0 / static_cast<double>(a.cols()));
}

Var concat_cols(std::span<const Var> parts) {
  require(!parts.empty(), ErrorKind::structural, "concat_cols of nothing");
  Graph* graph = parts.front().graph;
  const std::size_t n = parts.front().rows();
  std::size_t total = 0;
  std::vector<std::size_t> ids, widths;
  for (const Var& p : parts) {
    require_matrix(p, "concat_cols");
    require(p.graph == graph, ErrorKind::structural, "concat_cols: operands on different graphs");
    require(p.rows() == n, ErrorKind::structural,
            "concat_cols row mismatch: " + std::to_string(p.rows()) + " vs " + std::to_string(n));
    ids.push_back(p.id);
    widths.push_back(p.cols());
    total += p.cols();
  }
  Tensor out = Tensor::matrix(n, total);
  std::size_t offset = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < v.cols(); ++j) out.at(i, offset + j) = v.at(i, j);
    offset += v.cols();
  }
  return graph->emit("concat_cols", ids, std::move(out), [=](Graph& g, std::size_t self) {
    const Tensor& go = g.grad(self);
    std::size_t off = 0;
    for (std::size_t p = 0; p < ids.size(); ++p) {
      if (g.needs_grad(ids[p])) {
        Tensor& gp = g.grad_buffer(ids[p]);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < widths[p]; ++j) gp.at(i, j) += go.at(i, off + j);
      }
      off += widths[p];
    }
  });
}

Var slice_cols(Var a, std::size_t begin, std::size_t end) {
  require_matrix(a, "slice_cols");
  const std::size_t n = a.rows(), m = a.cols();
  require(begin < end && end <= m, ErrorKind::structural,
          "slice_cols [" + std::to_string(begin) + "," + std::to_string(end) + ") out of range for width " +
              std::to_string(m));
  const std::size_t w = end - begin;
  const Tensor& av = a.value();
  Tensor out = Tensor::matrix(n, w);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < w; ++j) out.at(i, j) = av.at(i, begin + j);
  const std::size_t ia = a.id;
  return a.graph->emit("slice_cols", {ia}, std::move(out), [=](Graph& g, std::size_t self) {
    const Tensor& go = g.grad(self);
    Tensor& ga = g.grad_buffer(ia);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < w; ++j) ga.at(i, begin + j) += go.at(i, j);
  });
}

Var slice_rows(Var a, std::size_t begin, std::size_t end) {
  require_matrix(a, "slice_rows");
  const std::size_t n = a.rows(), m = a.cols();
  require(begin < end && end <= n, ErrorKind::structural,
          "slice_rows [" + std::to_string(begin) + "," + std::to_string(end) + ") out of range for " +
              std::to_string(n) + " rows");
  const Tensor& av = a.value();
  std::vector<double> data(av.data() + begin * m, av.data() + end * m);
  const std::size_t ia = a.id;
  return a.graph->emit("slice_rows", {ia}, Tensor({end - begin, m}, std::move(data)),
                       [=](Graph& g, std::size_t self) {
                         const Tensor& go = g.grad(self);
                         Tensor& ga = g.grad_buffer(ia);
                         for (std::size_t k = 0; k < go.size(); ++k) ga[begin * m + k] += go[k];
                       });
}

Var reshape(Var a, std::size_t rows, std::size_t cols) {
  require_matrix(a, "reshape");
  require(rows * cols == a.value().size(), ErrorKind::structural,
          "reshape of " + shape_string(a.shape()) + " to [" + std::to_string(rows) + "," +
              std::to_string(cols) + "]");
  const Tensor& av = a.value();
  std::vector<double> data(av.values().begin(), av.values().end());
  const std::size_t ia = a.id;
  return a.graph->emit("reshape", {ia}, Tensor({rows, cols}, std::move(data)),
                       [=](Graph& g, std::size_t self) {
                         const Tensor& go = g.grad(self);
                         Tensor& ga = g.grad_buffer(ia);
                         for (std::size_t k = 0; k < go.size(); ++k) ga[k] += go[k];
                       });
}

Var mse(Var a, Var b) {
  require(a.shape() == b.shape(), ErrorKind::structural,
          "mse shape mismatch " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  return mean(square(sub(a, b)));
}

Var bce(Var p, Var target) {
  require(p.shape() == target.shape(), ErrorKind::structural,
          "bce shape mismatch " + shape_string(p.shape()) + " vs " + shape_string(target.shape()));
  Var pc = clamp(p, kProbFloor, 1.0 - kProbFloor);
  Var one_minus_p = add_scalar(scale(pc, -1.0), 1.0);
  Var one_minus_t = add_scalar(scale(target, -1.0), 1.0);
  Var ll = add(mul(target, log(pc)), mul(one_minus_t, log(one_minus_p)));
  return scale(mean(ll), -1.0);
}

Var cross_entropy_per_sample(Var logits, std::span<const int> labels) {
  require_matrix(logits, "cross_entropy_per_sample");
  const Tensor& z = logits.value();
  const std::size_t n = z.rows(), c = z.cols();
  require(labels.size() == n, ErrorKind::structural,
          "cross_entropy_per_sample: " + std::to_string(labels.size()) + " labels for " +
              std::to_string(n) + " rows");
  std::vector<int> y(labels.begin(), labels.end());
  for (int label : y) {
    require(label >= 0 && static_cast<std::size_t>(label) < c, ErrorKind::structural,
            "cross_entropy_per_sample: label " + std::to_string(label) + " outside [0," +
                std::to_string(c) + ")");
  }
  Tensor probs = kernels::softmax_rows(z);
  Tensor out = Tensor::matrix(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    double mx = z.at(i, 0);
    for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, z.at(i, j));
    double s = 0.0;
    for (std::size_t j = 0; j < c; ++j) s += std::exp(z.at(i, j) - mx);
    out[i] = std::log(s) + mx - z.at(i, static_cast<std::size_t>(y[i]));
  }
  const std::size_t il = logits.id;
  return logits.graph->emit(
      "cross_entropy_per_sample", {il}, std::move(out),
      [=, probs = std::move(probs), y = std::move(y)](Graph& g, std::size_t self) {
        const Tensor& go = g.grad(self);
        Tensor& gl = g.grad_buffer(il);
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < c; ++j) {
            const double onehot = (static_cast<int>(j) == y[i]) ? 1.0 : 0.0;
            gl.at(i, j) += go[i] * (probs.at(i, j) - onehot);
          }
      });
}

Var detach(Var a) { return a.graph->constant(a.value(), "detach"); }

}  // namespace ssal::ops
