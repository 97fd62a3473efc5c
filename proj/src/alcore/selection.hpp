#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "alcore/strategy.hpp"
#include "numerics/rng.hpp"

namespace ssal {

/// Positions of the b smallest discriminator outputs, ties to the lower
/// position; everything when fewer than b remain. Returned ascending.
std::vector<std::size_t> select_samples(std::span<const double> disc_probs, std::size_t b);

/// Positions of the b largest scores with the same tie rule. Returned ascending.
std::vector<std::size_t> select_largest(std::span<const double> scores, std::size_t b);

/// Shannon entropy (nats) of each probability row.
std::vector<double> prediction_entropy(const Tensor& probabilities);

/// random: uniform without replacement; entropy: largest prediction entropy;
/// maxloss: largest predicted loss. Positions refer to the unlabeled rows.
std::vector<std::size_t> baseline_select(StrategyKind strategy, const Tensor& probabilities,
                                         std::span<const double> predicted_losses, std::size_t b, Rng& rng);

}  // namespace ssal
