#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nets/linear.hpp"

namespace ssal {

struct TargetConfig {
  std::size_t input_dim = 2;
  std::size_t classes = 2;
  std::vector<std::size_t> widths{64, 64, 64};
  /// Block outputs feeding the loss-prediction head.
  std::vector<std::size_t> taps{0, 1, 2};
  std::size_t head_width = 16;
};

struct ClassifierOutput {
  Var logits;
  Var probabilities;
  std::vector<Var> taps;
  /// Output of the last block: the pre-softmax feature vector used for clustering.
  Var features;
};

/// Loss-prediction head: each tap is reduced by a mean over its feature
/// dimension, mapped to `width` units (affine + relu), the results are
/// concatenated and mapped to one predicted loss per sample.
class LossPredHead {
 public:
  LossPredHead() = default;
  LossPredHead(std::vector<std::size_t> tap_widths, std::size_t width, Rng& rng);

  /// [n, 1] predicted loss.
  Var forward(Graph& g, std::span<const Var> taps);

  void collect(std::vector<Parameter*>& out);
  std::size_t tap_count() const { return tap_widths_.size(); }

 private:
  std::vector<std::size_t> tap_widths_;
  std::vector<Linear> reducers_;
  Linear output_;
};

/// Dense classifier (affine + relu blocks, affine head to c logits) carrying
/// the attached loss-prediction head.
class TargetModel {
 public:
  TargetModel() = default;
  TargetModel(TargetConfig config, Rng& rng);

  ClassifierOutput forward(Graph& g, Var batch);
  Var predict_loss(Graph& g, const ClassifierOutput& out) { return head_.forward(g, out.taps); }

  const TargetConfig& config() const { return config_; }
  LossPredHead& loss_head() { return head_; }

  /// Backbone + classifier + loss head, in a fixed order with stable names.
  std::vector<Parameter*> parameters();
  std::vector<Parameter*> head_parameters();

 private:
  TargetConfig config_;
  std::vector<Linear> blocks_;
  Linear classifier_;
  LossPredHead head_;
};

}  // namespace ssal
