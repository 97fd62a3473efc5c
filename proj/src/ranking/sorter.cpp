#include "ranking/sorter.hpp"

#include <algorithm>
#include <cmath>

#include "common/error.hpp"
#include "numerics/ops.hpp"
#include "numerics/optim.hpp"
#include "ranking/ranks.hpp"

namespace ssal {
namespace {

void require_sequence_width(Var scores, std::size_t length) {
  require(scores.shape().size() == 2 && scores.cols() == length, ErrorKind::structural,
          "sorter expects sequences of length " + std::to_string(length) + ", got shape " +
              shape_string(scores.shape()));
}

void round_to_float(std::vector<Parameter*> params) {
  for (Parameter* p : params)
    for (double& v : p->value.values()) v = static_cast<double>(static_cast<float>(v));
}

}  // namespace

Var ExactRanker::soft_ranks(Graph& g, Var scores) {
  require_sequence_width(scores, length_);
  const Tensor& s = scores.value();
  Tensor out(s.shape());
  for (std::size_t i = 0; i < s.rows(); ++i) {
    const std::vector<double> r = true_ranks(s.values().subspan(i * length_, length_));
    std::copy(r.begin(), r.end(), out.data() + i * length_);
  }
  return g.constant(std::move(out), "exact_ranks");
}

LstmSorter::LstmSorter(SorterShape shape, Rng& rng) : shape_(shape) {
  require(shape_.length >= 2 && shape_.hidden > 0, ErrorKind::config,
          "sorter needs length >= 2 and a positive hidden width");
  forward_ = make_direction("sorter.fwd", rng);
  backward_ = make_direction("sorter.bwd", rng);
  out_ = Linear("sorter.out", 2 * shape_.hidden, 1, rng);
}

LstmSorter::Direction LstmSorter::make_direction(const std::string& prefix, Rng& rng) const {
  const std::size_t h = shape_.hidden;
  Direction d;
  d.w_x = Parameter(prefix + ".w_x", rng.normal_tensor({1, 4 * h}, std::sqrt(2.0)));
  d.w_h = Parameter(prefix + ".w_h", rng.normal_tensor({h, 4 * h}, std::sqrt(2.0 / static_cast<double>(h))));
  Tensor bias = Tensor::matrix(1, 4 * h);
  for (std::size_t j = h; j < 2 * h; ++j) bias[j] = 1.0;  // forget gate
  d.bias = Parameter(prefix + ".bias", std::move(bias));
  return d;
}

std::vector<Var> LstmSorter::run(Graph& g, Direction& dir, const std::vector<Var>& xs, bool reverse) {
  const std::size_t h = shape_.hidden;
  const std::size_t n = xs.size();
  Var w_x = g.parameter(dir.w_x);
  Var w_h = g.parameter(dir.w_h);
  Var bias = g.parameter(dir.bias);
  std::vector<Var> hs(n);
  Var hidden{}, cell{};
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t t = reverse ? n - 1 - step : step;
    Var gates = ops::add(ops::matmul(xs[t], w_x), bias);
    if (step > 0) gates = ops::add(gates, ops::matmul(hidden, w_h));
    Var in_gate = ops::sigmoid(ops::slice_cols(gates, 0, h));
    Var forget_gate = ops::sigmoid(ops::slice_cols(gates, h, 2 * h));
    Var candidate = ops::tanh(ops::slice_cols(gates, 2 * h, 3 * h));
    Var out_gate = ops::sigmoid(ops::slice_cols(gates, 3 * h, 4 * h));
    Var update = ops::mul(in_gate, candidate);
    cell = step > 0 ? ops::add(ops::mul(forget_gate, cell), update) : update;
    hidden = ops::mul(out_gate, ops::tanh(cell));
    hs[t] = hidden;
  }
  return hs;
}

Var LstmSorter::soft_ranks(Graph& g, Var scores) {
  require_sequence_width(scores, shape_.length);
  std::vector<Var> xs;
  xs.reserve(shape_.length);
  for (std::size_t t = 0; t < shape_.length; ++t) xs.push_back(ops::slice_cols(scores, t, t + 1));
  const std::vector<Var> hf = run(g, forward_, xs, false);
  const std::vector<Var> hb = run(g, backward_, xs, true);
  std::vector<Var> outputs;
  outputs.reserve(shape_.length);
  for (std::size_t t = 0; t < shape_.length; ++t) {
    const Var both[] = {hf[t], hb[t]};
    outputs.push_back(out_.forward(g, ops::concat_cols(both)));
  }
  return ops::concat_cols(outputs);
}

void LstmSorter::freeze_on(Graph& g) {
  for (const Parameter* p : parameters()) g.freeze(*p);
}

std::vector<Parameter*> LstmSorter::parameters() {
  std::vector<Parameter*> out;
  for (Direction* d : {&forward_, &backward_}) {
    out.push_back(&d->w_x);
    out.push_back(&d->w_h);
    out.push_back(&d->bias);
  }
  out_.collect(out);
  return out;
}

SorterBatch gen_sorter_batch(std::uint64_t seed, std::size_t length, std::size_t batch) {
  require(length >= 2, ErrorKind::config, "sorter sequences need length >= 2");
  Rng rng = Rng::derive(seed, "sorter-batch");
  SorterBatch out{Tensor::matrix(batch, length), Tensor::matrix(batch, length)};
  std::vector<double> row(length);
  for (std::size_t b = 0; b < batch; ++b) {
    switch (rng.index(3)) {
      case 0:
        for (double& v : row) v = rng.uniform();
        break;
      case 1: {
        const double mu = rng.uniform(-1.0, 1.0);
        const double sigma = rng.uniform(0.2, 1.0);
        for (double& v : row) v = rng.normal(mu, sigma);
        break;
      }
      default: {
        for (double& v : row) v = rng.uniform();
        const std::size_t segments = 2 + rng.index(3);
        std::vector<std::size_t> cuts{0, length};
        for (std::size_t s = 1; s < segments; ++s) cuts.push_back(1 + rng.index(length - 1));
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
          auto first = row.begin() + static_cast<std::ptrdiff_t>(cuts[s]);
          auto last = row.begin() + static_cast<std::ptrdiff_t>(cuts[s + 1]);
          if (rng.index(2) == 0) {
            std::sort(first, last);
          } else {
            std::sort(first, last, std::greater<>());
          }
        }
        break;
      }
    }
    const std::vector<double> ranks = true_ranks(row);
    std::copy(row.begin(), row.end(), out.scores.data() + b * length);
    std::copy(ranks.begin(), ranks.end(), out.ranks.data() + b * length);
  }
  return out;
}

Var sorter_l1(Graph& g, Ranker& ranker, const SorterBatch& data) {
  Var soft = ranker.soft_ranks(g, g.constant(data.scores, "scores"));
  return ops::mean(ops::abs(ops::sub(soft, g.constant(data.ranks, "true_ranks"))));
}

double mean_spearman(Ranker& ranker, const SorterBatch& data) {
  const std::size_t n = data.scores.rows(), len = data.scores.cols();
  require(n > 0, ErrorKind::structural, "mean_spearman over an empty set");
  double total = 0.0;
  constexpr std::size_t kChunk = 256;
  for (std::size_t start = 0; start < n; start += kChunk) {
    const std::size_t end = std::min(n, start + kChunk);
    Graph g;
    Var scores = g.constant(Tensor({end - start, len}, std::vector<double>(data.scores.data() + start * len,
                                                                           data.scores.data() + end * len)));
    const Tensor& soft = ranker.soft_ranks(g, scores).value();
    for (std::size_t i = 0; i < end - start; ++i) {
      total += spearman(soft.values().subspan(i * len, len), data.ranks.values().subspan((start + i) * len, len));
    }
  }
  return total / static_cast<double>(n);
}

SorterBatch sorter_heldout_set(const SorterTrainConfig& config) {
  return gen_sorter_batch(Rng::derive(config.seed, "sorter-heldout").next_u64(), config.length, config.heldout);
}

PretrainedSorter pretrain_sorter(const SorterTrainConfig& config, const ProgressFn& progress) {
  require(config.epochs > 0 && config.vectors_per_epoch > 0 && config.batch > 0 && config.heldout > 0,
          ErrorKind::config, "sorter training needs positive epochs, vectors_per_epoch, batch and heldout");
  Rng init_rng = Rng::derive(config.seed, "sorter-init");
  PretrainedSorter result{LstmSorter({config.length, config.hidden}, init_rng), {}};
  LstmSorter& sorter = result.sorter;
  Adam opt(sorter.parameters(), {config.learning_rate});

  SorterBatch identity{Tensor::matrix(1, config.length), Tensor::matrix(1, config.length)};
  for (std::size_t t = 0; t < config.length; ++t) {
    identity.scores[t] = 1.0 - static_cast<double>(t) / static_cast<double>(config.length - 1);
    identity.ranks[t] = static_cast<double>(t) / static_cast<double>(config.length - 1);
  }

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const SorterBatch data = gen_sorter_batch(Rng::derive(config.seed, "sorter-train", epoch).next_u64(),
                                              config.length, config.vectors_per_epoch);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    try {
      for (std::size_t start = 0; start < config.vectors_per_epoch; start += config.batch) {
        const std::size_t end = std::min(config.vectors_per_epoch, start + config.batch);
        const std::size_t len = config.length;
        SorterBatch mb{
            Tensor({end - start, len}, std::vector<double>(data.scores.data() + start * len, data.scores.data() + end * len)),
            Tensor({end - start, len}, std::vector<double>(data.ranks.data() + start * len, data.ranks.data() + end * len))};
        opt.zero_grad();
        Graph g;
        Var loss = sorter_l1(g, sorter, mb);
        g.backward(loss);
        opt.step();
        loss_sum += loss.value()[0];
        ++batches;
      }
      Graph g;
      result.report.identity_loss.push_back(sorter_l1(g, sorter, identity).value()[0]);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::numeric) throw;
      fail(ErrorKind::numeric, "sorter training diverged in epoch " + std::to_string(epoch) + ": " + e.what());
    }
    const double epoch_loss = loss_sum / static_cast<double>(batches);
    if (!std::isfinite(epoch_loss)) {
      fail(ErrorKind::numeric, "sorter training diverged in epoch " + std::to_string(epoch));
    }
    result.report.epoch_loss.push_back(epoch_loss);
    if (progress) {
      progress("sorter epoch " + std::to_string(epoch + 1) + "/" + std::to_string(config.epochs) +
               " loss " + std::to_string(epoch_loss));
    }
  }
  round_to_float(sorter.parameters());
  result.report.heldout_spearman = mean_spearman(sorter, sorter_heldout_set(config));
  return result;
}

}  // namespace ssal
