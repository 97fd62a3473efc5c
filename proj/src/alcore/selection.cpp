#include "alcore/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "common/error.hpp"

namespace ssal {
namespace {

template <class Less>
std::vector<std::size_t> top_positions(std::size_t n, std::size_t b, Less less) {
  require(n > 0, ErrorKind::structural, "cannot select from an empty unlabeled pool");
  require(b >= 1, ErrorKind::config, "budget must be at least 1");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t take = std::min(b, n);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::size_t a, std::size_t c) { return less(a, c) || (!less(c, a) && a < c); });
  order.resize(take);
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace

std::vector<std::size_t> select_samples(std::span<const double> disc_probs, std::size_t b) {
  return top_positions(disc_probs.size(), b, [&](std::size_t a, std::size_t c) { return disc_probs[a] < disc_probs[c]; });
}

std::vector<std::size_t> select_largest(std::span<const double> scores, std::size_t b) {
  return top_positions(scores.size(), b, [&](std::size_t a, std::size_t c) { return scores[a] > scores[c]; });
}

std::vector<double> prediction_entropy(const Tensor& probabilities) {
  std::vector<double> h(probabilities.rows(), 0.0);
  for (std::size_t i = 0; i < probabilities.rows(); ++i) {
    for (std::size_t j = 0; j < probabilities.cols(); ++j) {
      const double p = probabilities.at(i, j);
      if (p > 0.0) h[i] -= p * std::log(p);
    }
  }
  return h;
}

std::vector<std::size_t> baseline_select(StrategyKind strategy, const Tensor& probabilities,
                                         std::span<const double> predicted_losses, std::size_t b, Rng& rng) {
  switch (strategy) {
    case StrategyKind::random: {
      const std::size_t n = probabilities.rows();
      require(n > 0, ErrorKind::structural, "cannot select from an empty unlabeled pool");
      require(b >= 1, ErrorKind::config, "budget must be at least 1");
      std::vector<std::size_t> perm = rng.permutation(n);
      perm.resize(std::min(b, n));
      std::sort(perm.begin(), perm.end());
      return perm;
    }
    case StrategyKind::entropy: return select_largest(prediction_entropy(probabilities), b);
    case StrategyKind::maxloss:
      require(predicted_losses.size() == probabilities.rows(), ErrorKind::structural,
              "maxloss needs one predicted loss per unlabeled sample");
      return select_largest(predicted_losses, b);
    default: fail(ErrorKind::config, std::string(strategy_name(strategy)) + " is not a baseline strategy");
  }
}

}  // namespace ssal
