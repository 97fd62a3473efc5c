#pragma once

#include <span>
#include <vector>

namespace ssal {

/// Normalized descending ranks: the largest score gets 0, the smallest 1.
/// rank(i) = (#{j : s_j > s_i} + #{j < i : s_j == s_i}) / (n - 1).
/// Throws a structural error for fewer than two scores.
std::vector<double> true_ranks(std::span<const double> scores);

/// Spearman correlation, computed as the Pearson correlation of the two
/// tie-broken rank vectors. Returns 0 when either rank vector is constant.
double spearman(std::span<const double> a, std::span<const double> b);


}  // namespace ssal
