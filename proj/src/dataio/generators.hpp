#pragma once

#include <cstddef>
#include <cstdint>

#include "dataio/dataset.hpp"

namespace ssal {

/// Isotropic Gaussian blobs. Class centers sit on a circle in the first two
/// coordinates (on a line when d == 1) with adjacent centers 4 units apart
/// and a seed-dependent rotation; any further coordinates are pure noise.
/// Class counts are balanced within one. Returned unnormalized.
Dataset make_blobs(std::uint64_t seed, std::size_t n, std::size_t classes, std::size_t dim, double sigma);

/// Two interleaved unit half-circles (class 0 centered at the origin, class 1
/// at (1, 0.5)) with Gaussian noise. Returned unnormalized.
Dataset make_two_moons(std::uint64_t seed, std::size_t n, double noise);

}  // namespace ssal
