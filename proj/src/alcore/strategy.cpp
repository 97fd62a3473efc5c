#include "alcore/strategy.hpp"

namespace ssal {

StrategyTraits strategy_traits(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::ssvaal: return {true, true, PseudoMode::agreement, true, true};
    case StrategyKind::ranking_only: return {true, false, PseudoMode::agreement, true, true};
    // Without the ranking module the loss head is never trained, so there is
    // no task signal to condition on.
    case StrategyKind::capl_only: return {false, true, PseudoMode::agreement, true, false};
    case StrategyKind::plain_pl: return {false, true, PseudoMode::threshold, true, false};
    case StrategyKind::random: return {};
    case StrategyKind::entropy: return {};
    case StrategyKind::maxloss: return {true, false, PseudoMode::agreement, false, false};
  }
  return {};
}

const std::vector<StrategyKind>& all_strategies() {
  static const std::vector<StrategyKind> all{StrategyKind::ssvaal,   StrategyKind::ranking_only,
                                             StrategyKind::capl_only, StrategyKind::plain_pl,
                                             StrategyKind::random,    StrategyKind::entropy,
                                             StrategyKind::maxloss};
  return all;
}

const char* strategy_name(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::ssvaal: return "ssvaal";
    case StrategyKind::ranking_only: return "ssvaal-ranking-only";
    case StrategyKind::capl_only: return "ssvaal-capl-only";
    case StrategyKind::plain_pl: return "ssvaal-plain-pl";
    case StrategyKind::random: return "random";
    case StrategyKind::entropy: return "entropy";
    case StrategyKind::maxloss: return "maxloss";
  }
  return "?";
}

std::optional<StrategyKind> parse_strategy(std::string_view name) {
  for (StrategyKind k : all_strategies())
    if (name == strategy_name(k)) return k;
  return std::nullopt;
}

}  // namespace ssal
