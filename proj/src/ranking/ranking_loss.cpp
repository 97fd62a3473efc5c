#include "ranking/ranking_loss.hpp"

#include "common/error.hpp"
#include "numerics/ops.hpp"
#include "ranking/ranks.hpp"

namespace ssal {

Var ranking_loss(Graph& g, Var predicted, std::span<const double> target_losses, Ranker& ranker) {
  const std::size_t len = ranker.length();
  require(predicted.shape().size() == 2 && predicted.cols() == len, ErrorKind::structural,
          "ranking_loss expects sequences of length " + std::to_string(len) + ", got " +
              shape_string(predicted.shape()));
  require(target_losses.size() == predicted.value().size(), ErrorKind::structural,
          "ranking_loss: " + std::to_string(target_losses.size()) + " target losses for " +
              std::to_string(predicted.value().size()) + " predictions");
  Tensor truth(predicted.shape());
  for (std::size_t r = 0; r < predicted.rows(); ++r) {
    const std::vector<double> ranks = true_ranks(target_losses.subspan(r * len, len));
    std::copy(ranks.begin(), ranks.end(), truth.data() + r * len);
  }
  Var soft = ranker.soft_ranks(g, predicted);
  return ops::mean(ops::abs(ops::sub(soft, g.constant(std::move(truth), "target_ranks"))));
}

std::optional<Var> chunked_ranking_loss(Graph& g, Var predicted, std::span<const double> target_losses,
                                        Ranker& ranker) {
  require(predicted.cols() == 1 && predicted.rows() == target_losses.size(), ErrorKind::structural,
          "chunked_ranking_loss expects a [n,1] column matching the target losses");
  const std::size_t len = ranker.length();
  const std::size_t chunks = predicted.rows() / len;
  if (chunks == 0) return std::nullopt;
  Var used = chunks * len == predicted.rows() ? predicted : ops::slice_rows(predicted, 0, chunks * len);
  Var sequences = ops::reshape(used, chunks, len);
  return ranking_loss(g, sequences, target_losses.first(chunks * len), ranker);
}

Var task_loss(Var target_loss_mean, std::optional<Var> ranking, double lambda) {
  require(lambda >= 0.0, ErrorKind::config, "lambda must be non-negative");
  if (!ranking || lambda == 0.0) return target_loss_mean;
  return ops::add(target_loss_mean, ops::scale(*ranking, lambda));
}

}  // namespace ssal
