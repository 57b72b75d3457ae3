#include "hsdr/sampling.hpp"

#include <cmath>
#include <random>
#include <utility>

namespace hsdr {

std::vector<Index> sample_indices(Index population, Index n, std::uint64_t seed) {
  if (n < 0 || n > population)
    throw InvalidInput("sample_indices: sample size exceeds population");
  std::vector<Index> idx(static_cast<std::size_t>(population));
  for (Index i = 0; i < population; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::mt19937_64 rng(seed);
  for (Index i = 0; i < n; ++i) {
    const Index j =
        i + static_cast<Index>(rng() % static_cast<std::uint64_t>(population - i));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(n));
  return idx;
}

Matrix sample_rows(const Matrix& x, Index n, std::uint64_t seed) {
  if (n < 1 || n > x.rows())
    throw InvalidInput("sample_rows: need 1 <= n <= rows");
  const std::vector<Index> idx = sample_indices(x.rows(), n, seed);
  Matrix out(n, x.cols());
  for (Index i = 0; i < n; ++i) out.row(i) = x.row(idx[static_cast<std::size_t>(i)]);
  return out;
}

Matrix sample_pixels(const HsiCube& cube, Index n, std::uint64_t seed) {
  return sample_rows(cube.values, n, seed);
}

Matrix standardize(const Matrix& components) {
  if (components.rows() == 0) return components;
  Matrix out(components.rows(), components.cols());
  const Scalar n = static_cast<Scalar>(components.rows());
  for (Index c = 0; c < components.cols(); ++c) {
    const auto col = components.col(c);
    if (col.maxCoeff() == col.minCoeff()) {
      out.col(c).setZero();
      continue;
    }
    const Scalar mean = col.mean();
    const Scalar sd = std::sqrt((col.array() - mean).square().sum() / n);
    out.col(c) = (col.array() - mean) / sd;
  }
  return out;
}

}  // namespace hsdr
