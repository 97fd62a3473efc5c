#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nets/linear.hpp"

namespace ssal {

/// Maps a batch of score sequences [B, L] to (soft) normalized ranks [B, L]
/// under the descending convention of true_ranks.
class Ranker {
 public:
  virtual ~Ranker() = default;
  virtual std::size_t length() const = 0;
  virtual Var soft_ranks(Graph& g, Var scores) = 0;
  /// Marks the ranker's own weights as constants on `g` (pretrained, read-only use).
  virtual void freeze_on(Graph&) {}
};

/// Exact, non-differentiable ranking. Used as the oracle when checking the
/// ranking loss; its output is a constant on the tape.
class ExactRanker final : public Ranker {
 public:
  explicit ExactRanker(std::size_t length) : length_(length) {}
  std::size_t length() const override { return length_; }
  Var soft_ranks(Graph& g, Var scores) override;

 private:
  std::size_t length_;
};

struct SorterShape {
  std::size_t length = 16;
  std::size_t hidden = 128;
};

/// Bidirectional LSTM over the score sequence followed by a per-position
/// affine projection to one soft rank.
class LstmSorter final : public Ranker {
 public:
  LstmSorter() = default;
  LstmSorter(SorterShape shape, Rng& rng);

  std::size_t length() const override { return shape_.length; }
  Var soft_ranks(Graph& g, Var scores) override;
  void freeze_on(Graph& g) override;

  const SorterShape& shape() const { return shape_; }
  std::vector<Parameter*> parameters();

 private:
  struct Direction {
    Parameter w_x;  // [1, 4H]
    Parameter w_h;  // [H, 4H]
    Parameter bias;  // [1, 4H], gate order i, f, g, o
  };
  Direction make_direction(const std::string& prefix, Rng& rng) const;
  std::vector<Var> run(Graph& g, Direction& dir, const std::vector<Var>& xs, bool reverse);

  SorterShape shape_;
  Direction forward_;
  Direction backward_;
  Linear out_;
};

struct SorterBatch {
  Tensor scores;  // [batch, length]
  Tensor ranks;   // [batch, length], true_ranks of each row
};

/// Synthetic sorter training data: each row is drawn from a uniform, a
/// Gaussian, or a piecewise-sorted generator. Pure function of its arguments.
SorterBatch gen_sorter_batch(std::uint64_t seed, std::size_t length, std::size_t batch);

struct SorterTrainConfig {
  std::size_t length = 16;
  std::size_t hidden = 128;
  std::size_t epochs = 100;
  std::size_t vectors_per_epoch = 500;
  std::size_t batch = 32;
  std::size_t heldout = 1000;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
};

struct SorterReport {
  std::vector<double> epoch_loss;     // mean training L1 per epoch
  std::vector<double> identity_loss;  // L1 on an already-sorted input after each epoch
  double heldout_spearman = 0.0;
};

struct PretrainedSorter {
  LstmSorter sorter;
  SorterReport report;
};

using ProgressFn = std::function<void(const std::string&)>;

/// Trains a sorter with Adam on L1(soft ranks, true ranks). Parameters are
/// rounded to checkpoint precision before the held-out score is measured, so a
/// saved and reloaded sorter reproduces the reported score exactly.
PretrainedSorter pretrain_sorter(const SorterTrainConfig& config, const ProgressFn& progress = {});

/// Held-out set used by pretraining for a given config.
SorterBatch sorter_heldout_set(const SorterTrainConfig& config);

/// Mean per-row Spearman correlation between the ranker's output and the true ranks.
double mean_spearman(Ranker& ranker, const SorterBatch& data);

/// Mean L1 between soft ranks and true ranks over a batch.
Var sorter_l1(Graph& g, Ranker& ranker, const SorterBatch& data);

}  // namespace ssal
