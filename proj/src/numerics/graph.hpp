#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "numerics/tensor.hpp"

namespace ssal {

/// A trainable tensor with its gradient accumulator. Graphs refer to
/// parameters by address, so a Parameter must not move while a graph or an
/// optimizer holds it.
struct Parameter {
  Parameter() = default;
  Parameter(std::string name, Tensor init);

  std::string name;
  Tensor value;
  Tensor grad;

  void zero_grad() { grad.fill(0.0); }
};

class Graph;

/// Handle to a node of a Graph.
struct Var {
  Graph* graph = nullptr;
  std::size_t id = 0;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
};

/// Tape for reverse-mode differentiation. Nodes are appended in evaluation
/// order, so node ids are a topological order and backward() walks them in
/// exact reverse. Single-threaded; one graph per forward/backward pass.
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, std::size_t self)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor value, std::string op = "constant");
  /// Leaf bound to `p`. Reuses the existing node when `p` is already on the tape.
  Var parameter(Parameter& p);
  /// Later parameter(p) calls yield a constant: no gradient is computed for `p`
  /// and its grad buffer is never written, so it may be shared across threads.
  void freeze(const Parameter& p) { frozen_.insert(&p); }

  /// Appends an op node. Throws a numeric error naming the node when the value
  /// is not finite.
  Var emit(std::string op, std::vector<std::size_t> inputs, Tensor value, BackwardFn backward);

  /// Seeds d(loss)/d(loss) = 1, propagates, and adds leaf gradients into the
  /// bound parameters' grad buffers.
  void backward(Var loss);

  const Tensor& value(std::size_t id) const { return nodes_[id].value; }
  const Tensor& grad(std::size_t id) const { return nodes_[id].grad; }
  const std::string& op(std::size_t id) const { return nodes_[id].op; }
  bool needs_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  /// Adds `g` into node `id`'s gradient, allocating it on first use.
  void accumulate(std::size_t id, const Tensor& g);
  /// Mutable gradient buffer for in-place accumulation (allocated on demand).
  Tensor& grad_buffer(std::size_t id);

  std::size_t size() const noexcept { return nodes_.size(); }
  Var var(std::size_t id) { return Var{this, id}; }

 private:
  struct Node {
    std::string op;
    std::vector<std::size_t> inputs;
    Tensor value;
    Tensor grad;
    BackwardFn backward;
    Parameter* param = nullptr;
    bool requires_grad = false;
  };

  std::vector<Node> nodes_;
  std::unordered_map<const Parameter*, std::size_t> param_nodes_;
  std::unordered_set<const Parameter*> frozen_;
};

}  // namespace ssal
