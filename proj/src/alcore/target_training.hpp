#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "alcore/pool.hpp"
#include "alcore/strategy.hpp"
#include "capl/pseudo_label.hpp"
#include "dataio/config.hpp"
#include "dataio/dataset.hpp"
#include "nets/target_model.hpp"
#include "ranking/sorter.hpp"

namespace ssal {

struct TargetCycleResult {
  TargetModel model;
  /// One record per unlabeled sample when the strategy pseudo-labels; else empty.
  std::vector<PseudoLabelRecord> pseudo;
  PseudoLabelStats pseudo_stats;
  std::vector<double> epoch_loss;  // mean task loss per epoch, both stages
};

TargetConfig target_config_for(const ExperimentConfig& config, std::size_t input_dim, std::size_t classes);

/// Learning rate for `epoch` of a stage of `epochs`: x0.1 from 70% and again from 90%.
double stage_learning_rate(double base, std::size_t epoch, std::size_t epochs);

/// One target-model training cycle: a freshly initialized model is trained on
/// the labeled pool with L_target + lambda * L_ranking, pseudo labels are built
/// for the unlabeled pool, then a second stage trains on labeled and
/// pseudo-labeled samples. Parameters are rounded to checkpoint precision at
/// the end, so everything measured afterwards matches a saved model.
/// `sorter` is required iff the strategy uses ranking and lambda > 0.
TargetCycleResult train_target_cycle(const Dataset& pool_data, const PoolState& pool, const ExperimentConfig& config,
                                     StrategyKind strategy, Ranker* sorter, std::size_t cycle);

/// Outputs of a trained model over a set of rows, computed without a tape.
struct ModelOutputs {
  Tensor probabilities;                // [n, c]
  Tensor features;                     // [n, width of last block]
  std::vector<double> predicted_loss;  // loss-head output
};
ModelOutputs model_outputs(TargetModel& model, const Tensor& rows);

/// Exact per-sample cross-entropy of `labels` under the model.
std::vector<double> per_sample_loss(TargetModel& model, const Tensor& rows, std::span<const int> labels);

double accuracy(TargetModel& model, const Dataset& data);

}  // namespace ssal
