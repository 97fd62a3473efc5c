#pragma once

#include <optional>
#include <span>

#include "ranking/sorter.hpp"

namespace ssal {

/// Mean L1 between the ranker's soft ranks of `predicted` ([B, L]) and the
/// exact ranks of `target_losses` (B*L values, row-major). The targets enter as
/// constants: they are ground truth and receive no gradient.
Var ranking_loss(Graph& g, Var predicted, std::span<const double> target_losses, Ranker& ranker);

/// Splits a [n, 1] column of predicted losses into floor(n / L) sequences of the
/// ranker's length L and applies ranking_loss to all of them at once. A short
/// final chunk is dropped. Returns nothing when n < L.
std::optional<Var> chunked_ranking_loss(Graph& g, Var predicted, std::span<const double> target_losses,
                                        Ranker& ranker);

/// L = L_target + lambda * L_ranking.
Var task_loss(Var target_loss_mean, std::optional<Var> ranking, double lambda);

}  // namespace ssal
