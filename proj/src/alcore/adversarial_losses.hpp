#pragma once

#include "nets/vae.hpp"

namespace ssal {

struct TransductiveLoss {
  Var total;
  Var reconstruction;  // MSE, labeled + unlabeled
  Var kl;              // mean KL, labeled + unlabeled (unweighted)
};

/// Reconstruction error plus beta-weighted KL to the unit Gaussian prior for
/// both pools, each averaged over its batch. Lower is better.
TransductiveLoss vae_transductive_loss(Var x_labeled, const VaeOutput& labeled, Var x_unlabeled,
                                       const VaeOutput& unlabeled, double beta);

/// -E[log D(labeled)] - E[log D(unlabeled)]: the VAE wants every sample to look labeled.
Var vae_adversarial_loss(Var d_labeled, Var d_unlabeled);
Var vae_adversarial_loss(Graph& g, Discriminator& disc, Var z_labeled, Var r_labeled, Var z_unlabeled,
                         Var r_unlabeled);

/// L_VAE = L_trans + eta * L_adv.
Var vae_total_loss(Var transductive, Var adversarial, double eta);

/// -E[log D(labeled)] - E[log(1 - D(unlabeled))].
Var discriminator_loss(Var d_labeled, Var d_unlabeled);
Var discriminator_loss(Graph& g, Discriminator& disc, Var z_labeled, Var r_labeled, Var z_unlabeled,
                       Var r_unlabeled);

}  // namespace ssal
