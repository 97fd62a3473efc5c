#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace ssal {

/// Labeled / unlabeled partition of a training pool of `size` samples.
/// Both index lists are kept sorted ascending. Labels come from the oracle
/// (ground-truth lookup) at the moment a sample is labeled.
class PoolState {
 public:
  /// Labels `initial` samples drawn uniformly from the seeded stream.
  PoolState(std::span<const int> oracle, std::size_t initial, std::uint64_t seed);

  const std::vector<std::size_t>& labeled() const { return labeled_; }
  const std::vector<std::size_t>& unlabeled() const { return unlabeled_; }
  std::vector<int> labeled_classes() const;
  std::size_t size() const { return oracle_.size(); }
  std::size_t cycle() const { return history_.size(); }
  /// Dataset indices selected in each completed cycle.
  const std::vector<std::vector<std::size_t>>& history() const { return history_; }

  /// Moves `selected` dataset indices from the unlabeled to the labeled pool
  /// and closes the cycle. Every index must currently be unlabeled, once.
  void label(std::span<const std::size_t> selected);

  /// Throws a structural error if the partition is not disjoint and exhaustive.
  void check_invariants() const;

 private:
  std::vector<int> oracle_;
  std::vector<std::size_t> labeled_;
  std::vector<std::size_t> unlabeled_;
  std::vector<std::vector<std::size_t>> history_;
};

}  // namespace ssal
