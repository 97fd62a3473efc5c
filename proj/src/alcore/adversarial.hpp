#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "dataio/config.hpp"
#include "nets/vae.hpp"

namespace ssal {

/// Inputs to one adversarial stage. Losses are indexed like the rows.
struct AdversarialInputs {
  Tensor labeled;                          // X_L rows
  std::vector<double> labeled_losses;      // exact target losses (for r_L)
  Tensor unlabeled;                        // X_U rows
  std::vector<double> unlabeled_predicted; // loss-head outputs (for l_U)
  bool rank_conditioning = true;           // false feeds a constant 0
};

struct AdversarialResult {
  Vae vae;
  Discriminator disc;
  std::size_t steps = 0;
  // Means over the last epoch's steps; NaN when no step ran.
  double vae_loss = 0.0;
  double reconstruction = 0.0;
  double kl = 0.0;
  double adversarial = 0.0;
  double disc_loss = 0.0;
};

/// Rank scalars of a labeled batch: normalized descending ranks of the target
/// losses (highest loss -> 0). A lone sample gets 0.
std::vector<double> labeled_rank_scalars(std::span<const double> losses, bool conditioning);
/// Rank scalars of an unlabeled batch: min-max normalized predicted losses.
std::vector<double> unlabeled_rank_scalars(std::span<const double> predicted, bool conditioning);

/// Fresh VAE and discriminator trained with Adam, alternating one VAE step and
/// one discriminator step per unlabeled mini-batch. Latent noise comes from a
/// stream derived from (seed, cycle).
AdversarialResult train_adversarial(const AdversarialInputs& inputs, const ExperimentConfig& config,
                                    std::size_t cycle);

struct DiscriminatorScores {
  std::vector<double> labeled;    // D(mu(x)) per labeled row
  std::vector<double> unlabeled;  // D(mu(x)) per unlabeled row
  double accuracy = 0.0;          // balanced pool-membership accuracy at 0.5
};

/// Deterministic scoring with z = mu; each pool is normalized as one batch.
DiscriminatorScores score_pools(AdversarialResult& trained, const AdversarialInputs& inputs);

}  // namespace ssal
