#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "capl/pseudo_label.hpp"

namespace ssal {

enum class StrategyKind { ssvaal, ranking_only, capl_only, plain_pl, random, entropy, maxloss };

/// Which parts of the method a strategy switches on.
struct StrategyTraits {
  bool ranking = false;           // ranking loss on the loss-prediction head
  bool pseudo = false;            // semi-supervised stage with pseudo labels
  PseudoMode pseudo_mode = PseudoMode::agreement;
  bool adversarial = false;       // VAE / discriminator selection
  bool rank_conditioning = false; // feed r_L and predicted losses to the VAE and discriminator
};

StrategyTraits strategy_traits(StrategyKind kind);
std::optional<StrategyKind> parse_strategy(std::string_view name);
const char* strategy_name(StrategyKind kind);
const std::vector<StrategyKind>& all_strategies();

}  // namespace ssal
