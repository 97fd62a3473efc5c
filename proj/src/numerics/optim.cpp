#include "numerics/optim.hpp"

#include <cmath>

#include "common/error.hpp"

namespace ssal {
namespace {

void check_grad_shape(const Parameter& p) {
  require(p.grad.same_shape(p.value), ErrorKind::structural,
          "gradient shape " + shape_string(p.grad.shape()) + " does not match parameter '" + p.name +
              "' of shape " + shape_string(p.value.shape()));
}

}  // namespace

void zero_grads(std::span<Parameter* const> params) {
  for (Parameter* p : params) {
    if (p->grad.same_shape(p->value)) {
      p->zero_grad();
    } else {
      p->grad = Tensor(p->value.shape(), 0.0);
    }
  }
}

SgdMomentum::SgdMomentum(std::vector<Parameter*> params, SgdConfig config)
    : params_(std::move(params)), config_(config) {
  velocity_.reserve(params_.size());
  for (Parameter* p : params_) velocity_.emplace_back(p->value.shape(), 0.0);
}

void SgdMomentum::zero_grad() { zero_grads(params_); }

void SgdMomentum::step() {
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Parameter& p = *params_[i];
    check_grad_shape(p);
    Tensor& v = velocity_[i];
    require(v.same_shape(p.value), ErrorKind::structural,
            "momentum buffer does not match parameter '" + p.name + "'");
    for (std::size_t k = 0; k < v.size(); ++k) {
      v[k] = config_.momentum * v[k] + p.grad[k] + config_.weight_decay * p.value[k];
      p.value[k] -= config_.learning_rate * v[k];
    }
  }
  ++steps_;
}

Adam::Adam(std::vector<Parameter*> params, AdamConfig config) : params_(std::move(params)), config_(config) {
  for (Parameter* p : params_) {
    first_.emplace_back(p->value.shape(), 0.0);
    second_.emplace_back(p->value.shape(), 0.0);
  }
}

void Adam::zero_grad() { zero_grads(params_); }

void Adam::step() {
  ++steps_;
  const double t = static_cast<double>(steps_);
  const double c1 = 1.0 - std::pow(config_.beta1, t);
  const double c2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Parameter& p = *params_[i];
    check_grad_shape(p);
    Tensor& m = first_[i];
    Tensor& v = second_[i];
    for (std::size_t k = 0; k < m.size(); ++k) {
      const double g = p.grad[k];
      m[k] = config_.beta1 * m[k] + (1.0 - config_.beta1) * g;
      v[k] = config_.beta2 * v[k] + (1.0 - config_.beta2) * g * g;
      const double mhat = m[k] / c1;
      const double vhat = v[k] / c2;
      p.value[k] -= config_.learning_rate * mhat / (std::sqrt(vhat) + config_.epsilon);
    }
  }
}

}  // namespace ssal
