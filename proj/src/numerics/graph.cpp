#include "numerics/graph.hpp"

#include "common/error.hpp"

namespace ssal {

Parameter::Parameter(std::string n, Tensor init)
    : name(std::move(n)), value(std::move(init)), grad(value.shape(), 0.0) {}

const Tensor& Var::value() const { return graph->value(id); }

Var Graph::constant(Tensor value, std::string op) {
  require(value.all_finite(), ErrorKind::numeric,
          "non-finite value in " + op + " node #" + std::to_string(nodes_.size()));
  Node n;
  n.op = std::move(op);
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var{this, nodes_.size() - 1};
}

Var Graph::parameter(Parameter& p) {
  if (auto it = param_nodes_.find(&p); it != param_nodes_.end()) return Var{this, it->second};
  require(p.value.all_finite(), ErrorKind::numeric, "parameter '" + p.name + "' is not finite");
  if (frozen_.contains(&p)) {
    const Var v = constant(p.value, "frozen:" + p.name);
    param_nodes_.emplace(&p, v.id);
    return v;
  }
  Node n;
  n.op = "param:" + p.name;
  n.value = p.value;
  n.param = &p;
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  const std::size_t id = nodes_.size() - 1;
  param_nodes_.emplace(&p, id);
  return Var{this, id};
}

Var Graph::emit(std::string op, std::vector<std::size_t> inputs, Tensor value, BackwardFn backward) {
  const std::size_t id = nodes_.size();
  if (!value.all_finite()) {
    fail(ErrorKind::numeric, "non-finite output at node #" + std::to_string(id) + " (" + op + ")");
  }
  bool tracked = false;
  for (std::size_t in : inputs) tracked = tracked || nodes_[in].requires_grad;
  Node n;
  n.op = std::move(op);
  n.inputs = std::move(inputs);
  n.value = std::move(value);
  n.requires_grad = tracked;
  if (tracked) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var{this, id};
}

Tensor& Graph::grad_buffer(std::size_t id) {
  Node& n = nodes_[id];
  if (n.grad.empty()) n.grad = Tensor(n.value.shape(), 0.0);
  return n.grad;
}

void Graph::accumulate(std::size_t id, const Tensor& g) {
  if (!nodes_[id].requires_grad) return;
  grad_buffer(id).add_inplace(g);
}

void Graph::backward(Var loss) {
  require(loss.graph == this, ErrorKind::structural, "loss belongs to a different graph");
  const Tensor& lv = nodes_[loss.id].value;
  require(lv.size() == 1, ErrorKind::structural,
          "backward requires a scalar loss, got shape " + shape_string(lv.shape()));
  for (auto& n : nodes_) n.grad = Tensor();
  grad_buffer(loss.id).fill(1.0);

  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.grad.empty() || !n.requires_grad) continue;
    if (n.backward) n.backward(*this, i);
    if (n.param) {
      if (!n.grad.all_finite()) {
        fail(ErrorKind::numeric, "non-finite gradient for parameter '" + n.param->name + "'");
      }
      if (n.param->grad.empty()) n.param->grad = Tensor(n.param->value.shape(), 0.0);
      n.param->grad.add_inplace(n.grad);
    }
  }
}

}  // namespace ssal
