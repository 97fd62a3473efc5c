#include "ranking/ranks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "common/error.hpp"

namespace ssal {

std::vector<double> true_ranks(std::span<const double> scores) {
  const std::size_t n = scores.size();
  require(n >= 2, ErrorKind::structural, "true_ranks needs at least two scores, got " + std::to_string(n));
  for (double s : scores) require(std::isfinite(s), ErrorKind::numeric, "true_ranks: non-finite score");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<double> ranks(n);
  const double denom = static_cast<double>(n - 1);
  for (std::size_t pos = 0; pos < n; ++pos) ranks[order[pos]] = static_cast<double>(pos) / denom;
  return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), ErrorKind::structural, "spearman: length mismatch");
  const std::vector<double> ra = true_ranks(a);
  const std::vector<double> rb = true_ranks(b);
  const double n = static_cast<double>(ra.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace ssal
