#include "alcore/target_training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "capl/kmeans.hpp"
#include "common/error.hpp"
#include "dataio/checkpoint.hpp"
#include "numerics/ops.hpp"
#include "numerics/optim.hpp"
#include "ranking/ranking_loss.hpp"

namespace ssal {
namespace {

struct Sample {
  std::size_t index;  // row of pool_data
  int label;
  bool oracle;        // false for pseudo labels
};

// One pass over `samples` in shuffled mini-batches. Oracle-labeled rows are
// placed first within each batch so the ranking loss can use them alone.
double run_epoch(TargetModel& model, SgdMomentum& opt, const Tensor& features, std::vector<Sample>& samples,
                 std::size_t batch_size, Ranker* ranker, double lambda, Rng& rng) {
  std::shuffle(samples.begin(), samples.end(), rng.engine());
  const std::vector<Parameter*> params = model.parameters();
  double total = 0.0;
  std::size_t batches = 0;
  for (std::size_t start = 0; start < samples.size(); start += batch_size) {
    const std::size_t end = std::min(samples.size(), start + batch_size);
    std::stable_partition(samples.begin() + static_cast<std::ptrdiff_t>(start),
                          samples.begin() + static_cast<std::ptrdiff_t>(end), [](const Sample& s) { return s.oracle; });
    std::vector<std::size_t> rows;
    std::vector<int> labels;
    std::size_t oracle_rows = 0;
    for (std::size_t i = start; i < end; ++i) {
      rows.push_back(samples[i].index);
      labels.push_back(samples[i].label);
      oracle_rows += samples[i].oracle ? 1 : 0;
    }

    Graph g;
    if (ranker) ranker->freeze_on(g);
    Var x = g.constant(gather_rows(features, rows), "batch");
    ClassifierOutput out = model.forward(g, x);
    Var ce = ops::cross_entropy_per_sample(out.logits, labels);
    Var target_mean = ops::mean(ce);
    std::optional<Var> ranking;
    if (ranker && lambda > 0.0 && oracle_rows >= ranker->length()) {
      Var predicted = model.predict_loss(g, out);
      const std::span<const double> truth = ce.value().values().first(oracle_rows);
      if (oracle_rows < predicted.rows()) predicted = ops::slice_rows(predicted, 0, oracle_rows);
      ranking = chunked_ranking_loss(g, predicted, truth, *ranker);
    }
    Var loss = task_loss(target_mean, ranking, lambda);
    zero_grads(params);
    g.backward(loss);
    opt.step();
    total += loss.value().item();
    ++batches;
  }
  return batches ? total / static_cast<double>(batches) : 0.0;
}

std::vector<Sample> oracle_samples(const PoolState& pool, const Dataset& data) {
  std::vector<Sample> s;
  for (std::size_t i : pool.labeled()) s.push_back({i, data.labels[i], true});
  return s;
}

}  // namespace

TargetConfig target_config_for(const ExperimentConfig& config, std::size_t input_dim, std::size_t classes) {
  TargetConfig t;
  t.input_dim = input_dim;
  t.classes = classes;
  t.widths = config.hidden_widths;
  t.taps.resize(t.widths.size());
  std::iota(t.taps.begin(), t.taps.end(), std::size_t{0});
  t.head_width = config.loss_head_width;
  return t;
}

double stage_learning_rate(double base, std::size_t epoch, std::size_t epochs) {
  const double progress = static_cast<double>(epoch) / static_cast<double>(std::max<std::size_t>(epochs, 1));
  if (progress >= 0.9) return base * 0.01;
  if (progress >= 0.7) return base * 0.1;
  return base;
}

ModelOutputs model_outputs(TargetModel& model, const Tensor& rows) {
  Graph g;
  ClassifierOutput out = model.forward(g, g.constant(rows, "rows"));
  Var pred = model.predict_loss(g, out);
  ModelOutputs m{out.probabilities.value(), out.features.value(), {}};
  m.predicted_loss.assign(pred.value().values().begin(), pred.value().values().end());
  return m;
}

std::vector<double> per_sample_loss(TargetModel& model, const Tensor& rows, std::span<const int> labels) {
  Graph g;
  ClassifierOutput out = model.forward(g, g.constant(rows, "rows"));
  Var ce = ops::cross_entropy_per_sample(out.logits, labels);
  return {ce.value().values().begin(), ce.value().values().end()};
}

double accuracy(TargetModel& model, const Dataset& data) {
  require(data.size() > 0, ErrorKind::structural, "accuracy of an empty dataset");
  const Tensor probs = model_outputs(model, data.features).probabilities;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < probs.cols(); ++j)
      if (probs.at(i, j) > probs.at(i, best)) best = j;
    correct += static_cast<int>(best) == data.labels[i] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

TargetCycleResult train_target_cycle(const Dataset& pool_data, const PoolState& pool, const ExperimentConfig& config,
                                     StrategyKind strategy, Ranker* sorter, std::size_t cycle) {
  const StrategyTraits traits = strategy_traits(strategy);
  const bool use_ranking = traits.ranking && config.lambda > 0.0;
  require(!use_ranking || sorter != nullptr, ErrorKind::config,
          std::string("strategy ") + strategy_name(strategy) + " needs a pretrained sorter");
  Ranker* ranker = use_ranking ? sorter : nullptr;
  const double lambda = use_ranking ? config.lambda : 0.0;

  Rng init = Rng::derive(config.seed, "target-init", cycle);
  TargetCycleResult result{TargetModel(target_config_for(config, pool_data.dim(), pool_data.classes), init), {}, {},
                           {}};
  TargetModel& model = result.model;
  SgdMomentum opt(model.parameters(), {config.learning_rate, config.momentum, config.weight_decay});
  Rng batches = Rng::derive(config.seed, "target-batches", cycle);

  auto train_stage = [&](std::vector<Sample>& samples, std::size_t epochs, const char* stage) {
    for (std::size_t e = 0; e < epochs; ++e) {
      opt.set_learning_rate(stage_learning_rate(config.learning_rate, e, epochs));
      try {
        result.epoch_loss.push_back(
            run_epoch(model, opt, pool_data.features, samples, config.batch_size, ranker, lambda, batches));
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::numeric) throw;
        fail(ErrorKind::numeric, std::string(stage) + " epoch " + std::to_string(e) + ": " + err.what());
      }
    }
  };

  // Stage 1: supervised on the oracle-labeled pool.
  std::vector<Sample> samples = oracle_samples(pool, pool_data);
  train_stage(samples, config.supervised_epochs, "supervised");

  // Pseudo labels for the unlabeled pool.
  const bool pseudo = traits.pseudo && (traits.pseudo_mode == PseudoMode::threshold || config.capl);
  if (pseudo && !pool.unlabeled().empty()) {
    const Tensor unlabeled_rows = gather_rows(pool_data.features, pool.unlabeled());
    const ModelOutputs u = model_outputs(model, unlabeled_rows);
    std::vector<MaybeClass> clustering;
    if (traits.pseudo_mode == PseudoMode::agreement) {
      const ModelOutputs l = model_outputs(model, gather_rows(pool_data.features, pool.labeled()));
      if (l.features.rows() >= pool_data.classes) {
        KMeansModel km = kmeans_fit(l.features, pool_data.classes, Rng::derive(config.seed, "kmeans", cycle).next_u64());
        map_clusters(km, l.features, pool.labeled_classes());
        clustering = clustering_labels(km, u.features);
      } else {
        clustering.assign(u.features.rows(), std::nullopt);  // too few points to cluster: nothing agrees
      }
    }
    result.pseudo =
        build_pseudo_labels(pool.unlabeled(), u.probabilities, config.tau, clustering, traits.pseudo_mode);
    result.pseudo_stats = pseudo_label_stats(result.pseudo, pool_data.labels);
    for (const PseudoLabelRecord& r : result.pseudo)
      if (r.final_label) samples.push_back({r.index, *r.final_label, false});
  }

  // Stage 2: labeled plus pseudo-labeled samples, same loss, restarted schedule.
  train_stage(samples, config.semi_epochs, "semi-supervised");

  round_to_checkpoint_precision(model.parameters());
  return result;
}

}  // namespace ssal
