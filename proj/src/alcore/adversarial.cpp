#include "alcore/adversarial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "alcore/adversarial_losses.hpp"
#include "common/error.hpp"
#include "nets/rank_variable.hpp"
#include "numerics/ops.hpp"
#include "numerics/optim.hpp"
#include "ranking/ranks.hpp"

namespace ssal {
namespace {

Tensor rank_column(const std::vector<double>& v) { return Tensor::column(v); }

std::vector<double> pick(std::span<const double> v, std::span<const std::size_t> idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(v[i]);
  return out;
}

}  // namespace

std::vector<double> labeled_rank_scalars(std::span<const double> losses, bool conditioning) {
  if (!conditioning) return std::vector<double>(losses.size(), 0.0);
  if (losses.size() < 2) return std::vector<double>(losses.size(), 0.0);
  return true_ranks(losses);
}

std::vector<double> unlabeled_rank_scalars(std::span<const double> predicted, bool conditioning) {
  if (!conditioning) return std::vector<double>(predicted.size(), 0.0);
  return minmax_normalize(predicted);
}

AdversarialResult train_adversarial(const AdversarialInputs& in, const ExperimentConfig& config, std::size_t cycle) {
  const std::size_t nl = in.labeled.rows(), nu = in.unlabeled.rows();
  require(nl > 0 && nu > 0, ErrorKind::structural, "adversarial training needs both pools nonempty");
  require(in.labeled_losses.size() == nl && in.unlabeled_predicted.size() == nu, ErrorKind::structural,
          "adversarial training needs one loss per row");
  require(in.labeled.cols() == in.unlabeled.cols(), ErrorKind::structural, "pool feature widths differ");

  Rng init = Rng::derive(config.seed, "adversarial-init", cycle);
  AdversarialResult r{Vae({in.labeled.cols(), config.latent_dim, config.vae_hidden}, init),
                      Discriminator(config.latent_dim, config.disc_hidden, init)};
  const std::vector<Parameter*> vae_params = r.vae.parameters();
  const std::vector<Parameter*> disc_params = r.disc.parameters();
  Adam vae_opt(vae_params, {config.adversarial_lr});
  Adam disc_opt(disc_params, {config.adversarial_lr});
  Rng order = Rng::derive(config.seed, "adversarial-batches", cycle);
  Rng noise = Rng::derive(config.seed, "adversarial-noise", cycle);

  const std::size_t batch = config.adversarial_batch;
  const std::size_t lbatch = std::min(batch, nl);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  r.vae_loss = r.reconstruction = r.kl = r.adversarial = r.disc_loss = nan;

  std::vector<std::size_t> lperm = order.permutation(nl);
  std::size_t lpos = 0;
  auto next_labeled = [&]() {
    std::vector<std::size_t> idx;
    while (idx.size() < lbatch) {
      if (lpos == nl) {
        lperm = order.permutation(nl);
        lpos = 0;
      }
      idx.push_back(lperm[lpos++]);
    }
    return idx;
  };

  for (std::size_t epoch = 0; epoch < config.adversarial_epochs; ++epoch) {
    const std::vector<std::size_t> uperm = order.permutation(nu);
    double sums[5] = {0, 0, 0, 0, 0};
    std::size_t count = 0;
    for (std::size_t start = 0; start < nu; start += batch) {
      const std::span<const std::size_t> uidx(uperm.data() + start, std::min(batch, nu - start));
      const std::vector<std::size_t> lidx = next_labeled();
      const Tensor xl = gather_rows(in.labeled, lidx);
      const Tensor xu = gather_rows(in.unlabeled, uidx);
      const Tensor rl = rank_column(labeled_rank_scalars(pick(in.labeled_losses, lidx), in.rank_conditioning));
      const Tensor ru =
          rank_column(unlabeled_rank_scalars(pick(in.unlabeled_predicted, uidx), in.rank_conditioning));
      try {
        {  // VAE step against the current discriminator.
          Graph g;
          for (const Parameter* p : disc_params) g.freeze(*p);
          Var vxl = g.constant(xl, "x_labeled"), vxu = g.constant(xu, "x_unlabeled");
          Var vrl = g.constant(rl, "r_labeled"), vru = g.constant(ru, "r_unlabeled");
          VaeOutput ol = r.vae.forward(g, vxl, vrl, noise.normal_tensor({xl.rows(), config.latent_dim}));
          VaeOutput ou = r.vae.forward(g, vxu, vru, noise.normal_tensor({xu.rows(), config.latent_dim}));
          TransductiveLoss trans = vae_transductive_loss(vxl, ol, vxu, ou, config.beta);
          Var adv = vae_adversarial_loss(g, r.disc, ol.z, vrl, ou.z, vru);
          Var total = vae_total_loss(trans.total, adv, config.eta);
          zero_grads(vae_params);
          g.backward(total);
          vae_opt.step();
          sums[0] += total.value().item();
          sums[1] += trans.reconstruction.value().item();
          sums[2] += trans.kl.value().item();
          sums[3] += adv.value().item();
        }
        {  // Discriminator step on fresh latents from the updated VAE.
          Graph g;
          for (const Parameter* p : vae_params) g.freeze(*p);
          Var vrl = g.constant(rl, "r_labeled"), vru = g.constant(ru, "r_unlabeled");
          VaeOutput ol = r.vae.forward(g, g.constant(xl, "x_labeled"), vrl,
                                       noise.normal_tensor({xl.rows(), config.latent_dim}));
          VaeOutput ou = r.vae.forward(g, g.constant(xu, "x_unlabeled"), vru,
                                       noise.normal_tensor({xu.rows(), config.latent_dim}));
          Var loss = discriminator_loss(g, r.disc, ol.z, vrl, ou.z, vru);
          zero_grads(disc_params);
          g.backward(loss);
          disc_opt.step();
          sums[4] += loss.value().item();
        }
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::numeric) throw;
        fail(ErrorKind::numeric, "adversarial step " + std::to_string(r.steps) + ": " + err.what());
      }
      ++r.steps;
      ++count;
    }
    if (epoch + 1 == config.adversarial_epochs && count > 0) {
      const double n = static_cast<double>(count);
      r.vae_loss = sums[0] / n;
      r.reconstruction = sums[1] / n;
      r.kl = sums[2] / n;
      r.adversarial = sums[3] / n;
      r.disc_loss = sums[4] / n;
    }
  }
  return r;
}

DiscriminatorScores score_pools(AdversarialResult& trained, const AdversarialInputs& in) {
  auto score = [&](const Tensor& x, const std::vector<double>& ranks) {
    Graph g;
    Vae::Encoding enc = trained.vae.encode(g, g.constant(x, "rows"));
    Var d = trained.disc.forward(g, enc.mu, g.constant(Tensor::column(ranks), "ranks"));
    return std::vector<double>(d.value().values().begin(), d.value().values().end());
  };
  DiscriminatorScores s;
  s.labeled = score(in.labeled, labeled_rank_scalars(in.labeled_losses, in.rank_conditioning));
  s.unlabeled = score(in.unlabeled, unlabeled_rank_scalars(in.unlabeled_predicted, in.rank_conditioning));
  const double hit_l =
      static_cast<double>(std::count_if(s.labeled.begin(), s.labeled.end(), [](double p) { return p > 0.5; }));
  const double hit_u =
      static_cast<double>(std::count_if(s.unlabeled.begin(), s.unlabeled.end(), [](double p) { return p < 0.5; }));
  s.accuracy = 0.5 * (hit_l / static_cast<double>(s.labeled.size()) + hit_u / static_cast<double>(s.unlabeled.size()));
  return s;
}

}  // namespace ssal
