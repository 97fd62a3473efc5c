#include "alcore/pool.hpp"

#include <algorithm>

#include "common/error.hpp"
#include "numerics/rng.hpp"

namespace ssal {

PoolState::PoolState(std::span<const int> oracle, std::size_t initial, std::uint64_t seed)
    : oracle_(oracle.begin(), oracle.end()) {
  require(initial >= 1, ErrorKind::config, "initial labeled size must be at least 1");
  require(initial <= oracle_.size(), ErrorKind::config,
          "initial labeled size " + std::to_string(initial) + " exceeds the pool of " +
              std::to_string(oracle_.size()));
  std::vector<std::size_t> perm = Rng::derive(seed, "initial-pool").permutation(oracle_.size());
  labeled_.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(initial));
  unlabeled_.assign(perm.begin() + static_cast<std::ptrdiff_t>(initial), perm.end());
  std::sort(labeled_.begin(), labeled_.end());
  std::sort(unlabeled_.begin(), unlabeled_.end());
}

std::vector<int> PoolState::labeled_classes() const {
  std::vector<int> out;
  out.reserve(labeled_.size());
  for (std::size_t i : labeled_) out.push_back(oracle_[i]);
  return out;
}

void PoolState::label(std::span<const std::size_t> selected) {
  std::vector<std::size_t> picked(selected.begin(), selected.end());
  std::sort(picked.begin(), picked.end());
  require(std::adjacent_find(picked.begin(), picked.end()) == picked.end(), ErrorKind::structural,
          "selection contains a duplicate index");
  for (std::size_t i : picked) {
    require(std::binary_search(unlabeled_.begin(), unlabeled_.end(), i), ErrorKind::structural,
            "selected index " + std::to_string(i) + " is not in the unlabeled pool");
  }
  std::vector<std::size_t> rest;
  rest.reserve(unlabeled_.size() - picked.size());
  std::set_difference(unlabeled_.begin(), unlabeled_.end(), picked.begin(), picked.end(), std::back_inserter(rest));
  unlabeled_ = std::move(rest);
  std::vector<std::size_t> grown;
  grown.reserve(labeled_.size() + picked.size());
  std::merge(labeled_.begin(), labeled_.end(), picked.begin(), picked.end(), std::back_inserter(grown));
  labeled_ = std::move(grown);
  history_.push_back(std::move(picked));
}

void PoolState::check_invariants() const {
  require(labeled_.size() + unlabeled_.size() == oracle_.size(), ErrorKind::structural,
          "pool partition is not exhaustive");
  require(std::is_sorted(labeled_.begin(), labeled_.end()) && std::is_sorted(unlabeled_.begin(), unlabeled_.end()),
          ErrorKind::structural, "pool index lists are not sorted");
  std::vector<char> seen(oracle_.size(), 0);
  for (const auto* list : {&labeled_, &unlabeled_}) {
    for (std::size_t i : *list) {
      require(i < oracle_.size() && !seen[i], ErrorKind::structural,
              "index " + std::to_string(i) + " appears twice or out of range in the pool");
      seen[i] = 1;
    }
  }
}

}  // namespace ssal
