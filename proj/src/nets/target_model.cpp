#include "nets/target_model.hpp"

#include "common/error.hpp"
#include "numerics/ops.hpp"

namespace ssal {

LossPredHead::LossPredHead(std::vector<std::size_t> tap_widths, std::size_t width, Rng& rng)
    : tap_widths_(std::move(tap_widths)) {
  for (std::size_t k = 0; k < tap_widths_.size(); ++k) {
    reducers_.emplace_back("target.loss_head.reducer" + std::to_string(k), 1, width, rng);
  }
  output_ = Linear("target.loss_head.output", width * tap_widths_.size(), 1, rng, Init::zero);
}

Var LossPredHead::forward(Graph& g, std::span<const Var> taps) {
  require(taps.size() == tap_widths_.size(), ErrorKind::structural,
          "loss head expects " + std::to_string(tap_widths_.size()) + " taps, got " +
              std::to_string(taps.size()));
  std::vector<Var> parts;
  parts.reserve(taps.size());
  for (std::size_t k = 0; k < taps.size(); ++k) {
    require(taps[k].cols() == tap_widths_[k], ErrorKind::structural,
            "loss head tap " + std::to_string(k) + " expects width " + std::to_string(tap_widths_[k]) +
                ", got " + std::to_string(taps[k].cols()));
    Var pooled = ops::mean_cols(taps[k]);
    parts.push_back(ops::relu(reducers_[k].forward(g, pooled)));
  }
  return output_.forward(g, ops::concat_cols(parts));
}

void LossPredHead::collect(std::vector<Parameter*>& out) {
  for (auto& r : reducers_) r.collect(out);
  output_.collect(out);
}

TargetModel::TargetModel(TargetConfig config, Rng& rng) : config_(std::move(config)) {
  require(config_.input_dim > 0 && config_.classes >= 2, ErrorKind::config,
          "target model needs input_dim > 0 and at least two classes");
  require(!config_.widths.empty(), ErrorKind::config, "target model needs at least one block");
  require(config_.taps.size() >= 2, ErrorKind::config, "target model needs at least two feature taps");
  std::size_t in = config_.input_dim;
  for (std::size_t i = 0; i < config_.widths.size(); ++i) {
    blocks_.emplace_back("target.block" + std::to_string(i), in, config_.widths[i], rng);
    in = config_.widths[i];
  }
  classifier_ = Linear("target.classifier", in, config_.classes, rng, Init::zero);
  std::vector<std::size_t> tap_widths;
  for (std::size_t t : config_.taps) {
    require(t < config_.widths.size(), ErrorKind::config,
            "tap index " + std::to_string(t) + " has no matching block");
    tap_widths.push_back(config_.widths[t]);
  }
  head_ = LossPredHead(std::move(tap_widths), config_.head_width, rng);
}

ClassifierOutput TargetModel::forward(Graph& g, Var batch) {
  require(batch.cols() == config_.input_dim, ErrorKind::structural,
          "classifier expects " + std::to_string(config_.input_dim) + " input features, got " +
              std::to_string(batch.cols()));
  std::vector<Var> block_out;
  Var h = batch;
  for (auto& block : blocks_) {
    h = ops::relu(block.forward(g, h));
    block_out.push_back(h);
  }
  ClassifierOutput out;
  out.features = h;
  out.logits = classifier_.forward(g, h);
  out.probabilities = ops::softmax_rows(out.logits);
  for (std::size_t t : config_.taps) out.taps.push_back(block_out[t]);
  return out;
}

std::vector<Parameter*> TargetModel::parameters() {
  std::vector<Parameter*> out;
  for (auto& b : blocks_) b.collect(out);
  classifier_.collect(out);
  head_.collect(out);
  return out;
}

std::vector<Parameter*> TargetModel::head_parameters() {
  std::vector<Parameter*> out;
  head_.collect(out);
  return out;
}

}  // namespace ssal
