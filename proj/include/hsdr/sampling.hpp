#pragma once

#include "hsdr/core.hpp"
#include "hsdr/cube.hpp"

#include <vector>

namespace hsdr {

/// First n entries of a Fisher-Yates shuffle of 0..population-1 using
/// mt19937_64 and the draw j = i + rng() % (population - i). The draw is
/// part of the contract so that a fixed seed pins the exact sample.
std::vector<Index> sample_indices(Index population, Index n, std::uint64_t seed);

/// n rows drawn uniformly without replacement, in shuffle order.
Matrix sample_rows(const Matrix& x, Index n, std::uint64_t seed);
Matrix sample_pixels(const HsiCube& cube, Index n, std::uint64_t seed);

/// Column-wise zero mean, unit population standard deviation. Constant
/// columns map to all zeros.
Matrix standardize(const Matrix& components);

}  // namespace hsdr
