#include "alcore/experiment.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "alcore/adversarial.hpp"
#include "alcore/selection.hpp"
#include "alcore/target_training.hpp"
#include "common/error.hpp"
#include "dataio/loaders.hpp"

namespace ssal {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of(const std::vector<double>& v) {
  return v.empty() ? kNaN : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::vector<MetricsRow> ExperimentResult::rows() const {
  std::vector<MetricsRow> out;
  for (const auto& c : cycles) out.push_back(c.row);
  return out;
}

ExperimentData prepare_data(const ExperimentConfig& config) {
  Dataset all = load_dataset(config.dataset, config.seed);
  TrainTestSplit split = train_test_split(all, config.dataset.test_fraction, config.seed);
  return {std::move(split.train), std::move(split.test)};
}

bool needs_sorter(const ExperimentConfig& config) {
  const auto kind = parse_strategy(config.strategy);
  return kind && strategy_traits(*kind).ranking && config.lambda > 0.0;
}

void validate_experiment(const ExperimentConfig& config, bool sorter_available) {
  std::vector<std::string> problems = config_problems(config);
  if (!parse_strategy(config.strategy)) {
    std::string names;
    for (StrategyKind k : all_strategies()) names += std::string(names.empty() ? "" : ", ") + strategy_name(k);
    problems.push_back("unknown strategy '" + config.strategy + "' (expected one of " + names + ")");
  } else if (needs_sorter(config) && !sorter_available) {
    problems.push_back("strategy " + config.strategy +
                       " uses the ranking loss and needs a pretrained sorter (set sorter_checkpoint or pass --sorter)");
  }
  if (!problems.empty()) {
    std::string msg = std::to_string(problems.size()) + " config error(s):";
    for (const auto& p : problems) msg += "\n  " + p;
    fail(ErrorKind::config, msg);
  }
}

ExperimentResult run_experiment(const ExperimentConfig& config, Ranker* sorter, const RunHooks& hooks) {
  validate_experiment(config, sorter != nullptr);
  return run_experiment(config, prepare_data(config), sorter, hooks);
}

ExperimentResult run_experiment(const ExperimentConfig& config, const ExperimentData& data, Ranker* sorter,
                                const RunHooks& hooks) {
  validate_experiment(config, sorter != nullptr);
  const StrategyKind strategy = *parse_strategy(config.strategy);
  const StrategyTraits traits = strategy_traits(strategy);
  if (sorter && needs_sorter(config)) {
    require(sorter->length() == config.sorter_length, ErrorKind::config,
            "sorter length " + std::to_string(sorter->length()) + " does not match sorter_length " +
                std::to_string(config.sorter_length));
  }
  const Dataset& pool_data = data.pool;
  require(pool_data.classes == data.test.classes && pool_data.dim() == data.test.dim(), ErrorKind::structural,
          "pool and test splits disagree on shape");

  ExperimentResult result{{}, {}, PoolState(pool_data.labels, config.initial_labeled, config.seed)};
  PoolState& pool = result.pool;

  for (std::size_t cycle = 1; cycle <= config.cycles; ++cycle) {
    const auto t0 = std::chrono::steady_clock::now();
    auto say = [&](const std::string& msg) {
      if (hooks.progress) hooks.progress("[" + config.strategy + " seed " + std::to_string(config.seed) +
                                         " cycle " + std::to_string(cycle) + "] " + msg);
    };

    CycleMetrics m;
    m.row.cycle = cycle;
    m.row.labeled_count = pool.labeled().size();
    TargetCycleResult trained = train_target_cycle(pool_data, pool, config, strategy, sorter, cycle);
    m.row.test_accuracy = accuracy(trained.model, data.test);
    if (!trained.pseudo.empty()) {
      m.row.pseudo_count = trained.pseudo_stats.count;
      m.row.pseudo_error_rate = trained.pseudo_stats.undefined ? kNaN : trained.pseudo_stats.error_rate;
    } else {
      m.row.pseudo_count = 0;
      m.row.pseudo_error_rate = kNaN;
    }
    m.row.disc_acc = m.row.vae_loss = kNaN;
    m.disc_mean_labeled = m.disc_mean_unlabeled = m.vae_reconstruction = m.vae_kl = m.vae_adversarial = kNaN;
    say("trained on " + std::to_string(m.row.labeled_count) + " labels, test accuracy " +
        std::to_string(m.row.test_accuracy));

    std::vector<std::size_t> positions;
    if (!pool.unlabeled().empty()) {
      const Tensor unlabeled_rows = gather_rows(pool_data.features, pool.unlabeled());
      const ModelOutputs outs = model_outputs(trained.model, unlabeled_rows);
      if (traits.adversarial) {
        AdversarialInputs in;
        in.labeled = gather_rows(pool_data.features, pool.labeled());
        in.labeled_losses = per_sample_loss(trained.model, in.labeled, pool.labeled_classes());
        in.unlabeled = unlabeled_rows;
        in.unlabeled_predicted = outs.predicted_loss;
        in.rank_conditioning = traits.rank_conditioning;
        AdversarialResult adv = train_adversarial(in, config, cycle);
        const DiscriminatorScores scores = score_pools(adv, in);
        positions = select_samples(scores.unlabeled, config.budget);
        m.row.disc_acc = scores.accuracy;
        m.row.vae_loss = adv.vae_loss;
        m.disc_mean_labeled = mean_of(scores.labeled);
        m.disc_mean_unlabeled = mean_of(scores.unlabeled);
        m.vae_reconstruction = adv.reconstruction;
        m.vae_kl = adv.kl;
        m.vae_adversarial = adv.adversarial;
      } else {
        Rng rng = Rng::derive(config.seed, "baseline-select", cycle);
        const StrategyKind selector = strategy == StrategyKind::maxloss ? StrategyKind::maxloss
                                      : strategy == StrategyKind::entropy ? StrategyKind::entropy
                                                                          : StrategyKind::random;
        positions = baseline_select(selector, outs.probabilities, outs.predicted_loss, config.budget, rng);
      }
    }
    for (std::size_t p : positions) m.selected.push_back(pool.unlabeled()[p]);
    pool.label(m.selected);
    pool.check_invariants();

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    m.row.seconds = config.record_wall_clock ? secs : 0.0;
    say("selected " + std::to_string(m.selected.size()) + " samples in " + std::to_string(secs) + " s");
    if (hooks.after_cycle) hooks.after_cycle(pool, m);
    result.cycles.push_back(std::move(m));
    result.final_model = std::move(trained.model);
  }
  return result;
}

}  // namespace ssal
