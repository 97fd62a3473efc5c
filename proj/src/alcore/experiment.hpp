#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "alcore/pool.hpp"
#include "alcore/strategy.hpp"
#include "dataio/config.hpp"
#include "dataio/dataset.hpp"
#include "dataio/metrics.hpp"
#include "nets/target_model.hpp"
#include "ranking/sorter.hpp"

namespace ssal {

struct CycleMetrics {
  MetricsRow row;
  double disc_mean_labeled = 0.0;    // NaN without a discriminator
  double disc_mean_unlabeled = 0.0;
  double vae_reconstruction = 0.0;
  double vae_kl = 0.0;
  double vae_adversarial = 0.0;
  std::vector<std::size_t> selected;  // dataset indices labeled after this cycle
};

/// The training pool and held-out test split every strategy sees for a seed.
struct ExperimentData {
  Dataset pool;
  Dataset test;
};
ExperimentData prepare_data(const ExperimentConfig& config);

/// Config ranges plus strategy name and sorter availability; every problem is
/// reported in one config error before any compute.
void validate_experiment(const ExperimentConfig& config, bool sorter_available);

/// True when the strategy trains with the ranking loss (so it needs a sorter).
bool needs_sorter(const ExperimentConfig& config);

struct RunHooks {
  std::function<void(const std::string&)> progress;
  /// Called after each cycle's pool update.
  std::function<void(const PoolState&, const CycleMetrics&)> after_cycle;
};

struct ExperimentResult {
  std::vector<CycleMetrics> cycles;
  TargetModel final_model;  // model evaluated in the last cycle
  PoolState pool;

  std::vector<MetricsRow> rows() const;
};

/// Runs `config.cycles` cycles of target training, (adversarial training,)
/// selection and oracle labeling. Cycle t trains on K + (t-1)b samples and ends
/// with the pool grown by b, capped by what is left.
ExperimentResult run_experiment(const ExperimentConfig& config, Ranker* sorter, const RunHooks& hooks = {});
ExperimentResult run_experiment(const ExperimentConfig& config, const ExperimentData& data, Ranker* sorter,
                                const RunHooks& hooks = {});

}  // namespace ssal
