#include "nets/vae.hpp"

#include <array>

#include "common/error.hpp"
#include "numerics/ops.hpp"

namespace ssal {

void require_rank_column(Var rank, std::size_t rows, const char* who) {
  require(rank.graph != nullptr, ErrorKind::structural, std::string(who) + ": rank scalar missing");
  require(rank.shape().size() == 2 && rank.cols() == 1 && rank.rows() == rows, ErrorKind::structural,
          std::string(who) + ": rank scalars must be [" + std::to_string(rows) + ",1], got " +
              shape_string(rank.shape()));
}

Vae::Vae(VaeConfig config, Rng& rng) : config_(config) {
  require(config_.input_dim > 0 && config_.latent_dim > 0 && config_.hidden > 0, ErrorKind::config,
          "VAE dimensions must be positive");
  const std::size_t d = config_.input_dim, h = config_.hidden, z = config_.latent_dim;
  enc1_ = Linear("vae.enc1", d, h, rng);
  enc2_ = Linear("vae.enc2", h, h, rng);
  enc_mu_ = Linear("vae.enc_mu", h, z, rng);
  enc_logvar_ = Linear("vae.enc_logvar", h, z, rng);
  dec1_ = Linear("vae.dec1", z + 1, h, rng);
  dec2_ = Linear("vae.dec2", h, h, rng);
  dec_out_ = Linear("vae.dec_out", h, d, rng);
}

Vae::Encoding Vae::encode(Graph& g, Var x) {
  Var h = ops::relu(enc1_.forward(g, x));
  h = ops::relu(enc2_.forward(g, h));
  return {enc_mu_.forward(g, h), enc_logvar_.forward(g, h)};
}

Var Vae::reparameterize(Graph& g, const Encoding& enc, const Tensor& noise) {
  require(noise.shape() == enc.mu.shape(), ErrorKind::structural,
          "reparameterization noise " + shape_string(noise.shape()) + " does not match latent " +
              shape_string(enc.mu.shape()));
  Var eps = g.constant(noise, "noise");
  Var stddev = ops::exp(ops::scale(enc.logvar, 0.5));
  return ops::add(enc.mu, ops::mul(stddev, eps));
}

Var Vae::decode(Graph& g, Var z, Var rank) {
  require_rank_column(rank, z.rows(), "decoder");
  const std::array<Var, 2> parts{z, rank};
  Var h = ops::relu(dec1_.forward(g, ops::concat_cols(parts)));
  h = ops::relu(dec2_.forward(g, h));
  return dec_out_.forward(g, h);
}

VaeOutput Vae::forward(Graph& g, Var x, Var rank, const Tensor& noise) {
  require_rank_column(rank, x.rows(), "vae");
  Encoding enc = encode(g, x);
  Var z = reparameterize(g, enc, noise);
  return {enc.mu, enc.logvar, z, decode(g, z, rank)};
}

std::vector<Parameter*> Vae::parameters() {
  std::vector<Parameter*> out;
  for (Linear* l : {&enc1_, &enc2_, &enc_mu_, &enc_logvar_, &dec1_, &dec2_, &dec_out_}) l->collect(out);
  return out;
}

Discriminator::Discriminator(std::size_t latent_dim, std::size_t hidden, Rng& rng, Init output_init)
    : latent_dim_(latent_dim) {
  l1_ = Linear("disc.l1", latent_dim + 1, hidden, rng);
  l2_ = Linear("disc.l2", hidden, hidden, rng);
  out_ = Linear("disc.out", hidden, 1, rng, output_init);
}

Var Discriminator::forward(Graph& g, Var z, Var rank) {
  require(z.cols() == latent_dim_, ErrorKind::structural,
          "discriminator expects latent width " + std::to_string(latent_dim_) + ", got " +
              std::to_string(z.cols()));
  require_rank_column(rank, z.rows(), "discriminator");
  const std::array<Var, 2> parts{z, rank};
  Var h = ops::relu(l1_.forward(g, ops::concat_cols(parts)));
  h = ops::relu(l2_.forward(g, h));
  Var p = ops::sigmoid(out_.forward(g, h));
  return ops::clamp(p, ops::kProbFloor, 1.0 - ops::kProbFloor);
}

std::vector<Parameter*> Discriminator::parameters() {
  std::vector<Parameter*> out;
  for (Linear* l : {&l1_, &l2_, &out_}) l->collect(out);
  return out;
}

Var kl_unit_gaussian(Var mu, Var logvar) {
  require(mu.shape() == logvar.shape(), ErrorKind::structural, "kl: mu and logvar shapes differ");
  Var inner = ops::sub(ops::add_scalar(logvar, 1.0), ops::add(ops::square(mu), ops::exp(logvar)));
  return ops::scale(ops::sum_cols(inner), -0.5);
}

}  // namespace ssal
