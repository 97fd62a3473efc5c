#pragma once

#include <span>
#include <vector>

namespace ssal {

/// Min-max normalization into [0, 1]; a constant input maps to 0.5 everywhere.
std::vector<double> minmax_normalize(std::span<const double> values);

}  // namespace ssal
