#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "numerics/graph.hpp"

namespace ssal {

struct SgdConfig {
  double learning_rate = 0.05;
  double momentum = 0.9;
  double weight_decay = 0.0005;
};

/// Heavy-ball SGD: v <- m*v + g + wd*p, p <- p - lr*v.
class SgdMomentum {
 public:
  SgdMomentum(std::vector<Parameter*> params, SgdConfig config);

  void step();
  void zero_grad();
  void set_learning_rate(double lr) { config_.learning_rate = lr; }
  double learning_rate() const { return config_.learning_rate; }
  std::size_t steps() const { return steps_; }
  const Tensor& velocity(std::size_t i) const { return velocity_[i]; }

 private:
  std::vector<Parameter*> params_;
  std::vector<Tensor> velocity_;
  SgdConfig config_;
  std::size_t steps_ = 0;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Bias-corrected Adam.
class Adam {
 public:
  Adam(std::vector<Parameter*> params, AdamConfig config);

  void step();
  void zero_grad();
  void set_learning_rate(double lr) { config_.learning_rate = lr; }
  std::size_t steps() const { return steps_; }

 private:
  std::vector<Parameter*> params_;
  std::vector<Tensor> first_;
  std::vector<Tensor> second_;
  AdamConfig config_;
  std::size_t steps_ = 0;
};

void zero_grads(std::span<Parameter* const> params);

}  // namespace ssal
