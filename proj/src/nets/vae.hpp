#pragma once

#include <cstddef>
#include <vector>

#include "nets/linear.hpp"

namespace ssal {

struct VaeConfig {
  std::size_t input_dim = 2;
  std::size_t latent_dim = 8;
  std::size_t hidden = 64;
};

struct VaeOutput {
  Var mu;
  Var logvar;
  Var z;
  Var reconstruction;
};

/// Encoder x -> (mu, logvar); decoder [z, rank] -> x. The rank scalar is the
/// task-conditioning input: r_L for labeled samples, the normalized predicted
/// loss for unlabeled ones.
class Vae {
 public:
  Vae() = default;
  Vae(VaeConfig config, Rng& rng);

  struct Encoding {
    Var mu;
    Var logvar;
  };
  Encoding encode(Graph& g, Var x);
  /// z = mu + exp(logvar / 2) * noise, with caller-supplied noise [n, latent_dim].
  Var reparameterize(Graph& g, const Encoding& enc, const Tensor& noise);
  Var decode(Graph& g, Var z, Var rank);
  VaeOutput forward(Graph& g, Var x, Var rank, const Tensor& noise);

  const VaeConfig& config() const { return config_; }
  std::vector<Parameter*> parameters();

 private:
  VaeConfig config_;
  Linear enc1_, enc2_, enc_mu_, enc_logvar_;
  Linear dec1_, dec2_, dec_out_;
};

/// MLP on [z, rank] -> probability that the sample comes from the labeled pool.
class Discriminator {
 public:
  Discriminator() = default;
  Discriminator(std::size_t latent_dim, std::size_t hidden, Rng& rng, Init output_init = Init::he);

  /// [n, 1] probabilities, clamped to [1e-7, 1 - 1e-7].
  Var forward(Graph& g, Var z, Var rank);

  std::size_t latent_dim() const { return latent_dim_; }
  std::vector<Parameter*> parameters();

 private:
  std::size_t latent_dim_ = 0;
  Linear l1_, l2_, out_;
};

/// Per-sample KL(N(mu, exp(logvar)) || N(0, I)) = -0.5 * sum(1 + logvar - mu^2 - exp(logvar)), [n, 1].
Var kl_unit_gaussian(Var mu, Var logvar);

/// Checks a rank-scalar column against the batch it conditions.
void require_rank_column(Var rank, std::size_t rows, const char* who);

}  // namespace ssal
