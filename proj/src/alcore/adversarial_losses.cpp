#include "alcore/adversarial_losses.hpp"

#include "common/error.hpp"
#include "numerics/ops.hpp"

namespace ssal {
namespace {

void require_batch(Var v, const char* what) {
  require(v.graph != nullptr && v.rows() > 0, ErrorKind::structural, std::string(what) + " batch is empty");
}

}  // namespace

TransductiveLoss vae_transductive_loss(Var x_labeled, const VaeOutput& labeled, Var x_unlabeled,
                                       const VaeOutput& unlabeled, double beta) {
  require_batch(x_labeled, "labeled");
  require_batch(x_unlabeled, "unlabeled");
  require(beta >= 0.0, ErrorKind::config, "beta must be non-negative");
  Var recon = ops::add(ops::mse(labeled.reconstruction, x_labeled), ops::mse(unlabeled.reconstruction, x_unlabeled));
  Var kl = ops::add(ops::mean(kl_unit_gaussian(labeled.mu, labeled.logvar)),
                    ops::mean(kl_unit_gaussian(unlabeled.mu, unlabeled.logvar)));
  Var total = beta == 0.0 ? recon : ops::add(recon, ops::scale(kl, beta));
  return {total, recon, kl};
}

Var vae_adversarial_loss(Var d_labeled, Var d_unlabeled) {
  require_batch(d_labeled, "labeled");
  require_batch(d_unlabeled, "unlabeled");
  return ops::scale(ops::add(ops::mean(ops::log(d_labeled)), ops::mean(ops::log(d_unlabeled))), -1.0);
}

Var vae_adversarial_loss(Graph& g, Discriminator& disc, Var z_labeled, Var r_labeled, Var z_unlabeled,
                         Var r_unlabeled) {
  return vae_adversarial_loss(disc.forward(g, z_labeled, r_labeled), disc.forward(g, z_unlabeled, r_unlabeled));
}

Var vae_total_loss(Var transductive, Var adversarial, double eta) {
  require(eta >= 0.0, ErrorKind::config, "eta must be non-negative");
  if (eta == 0.0) return transductive;
  return ops::add(transductive, ops::scale(adversarial, eta));
}

Var discriminator_loss(Var d_labeled, Var d_unlabeled) {
  require_batch(d_labeled, "labeled");
  require_batch(d_unlabeled, "unlabeled");
  Var one_minus = ops::add_scalar(ops::scale(d_unlabeled, -1.0), 1.0);
  return ops::scale(ops::add(ops::mean(ops::log(d_labeled)), ops::mean(ops::log(one_minus))), -1.0);
}

Var discriminator_loss(Graph& g, Discriminator& disc, Var z_labeled, Var r_labeled, Var z_unlabeled,
                       Var r_unlabeled) {
  return discriminator_loss(disc.forward(g, z_labeled, r_labeled), disc.forward(g, z_unlabeled, r_unlabeled));
}

}  // namespace ssal
