#pragma once

// Reference-grade implementations used only to cross-check the library
// through an independent route. Keep these free of hsdr::numerics calls.

#include "hsdr/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using hsdr::Index;
using hsdr::Matrix;
using hsdr::Scalar;
using hsdr::Vector;

// Cyclic Jacobi rotations for a symmetric matrix. Returns eigenvalues in
// ascending order with matching eigenvector columns.
inline void jacobi_eig(Matrix a, Vector& values, Matrix& vectors) {
  const Index n = a.rows();
  vectors = Matrix::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    Scalar off = 0;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (std::sqrt(off) < 1e-14 * std::max<Scalar>(1.0, a.norm())) break;
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const Scalar theta = (a(q, q) - a(p, p)) / (2 * a(p, q));
        const Scalar t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1));
        const Scalar c = 1.0 / std::sqrt(t * t + 1);
        const Scalar s = t * c;
        Eigen::JacobiRotation<Scalar> rot(c, s);
        a.applyOnTheLeft(p, q, rot.adjoint());
        a.applyOnTheRight(p, q, rot);
        vectors.applyOnTheRight(p, q, rot);
      }
    }
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(),
            [&](Index i, Index j) { return a(i, i) < a(j, j); });
  values.resize(n);
  Matrix sorted(n, n);
  for (Index i = 0; i < n; ++i) {
    values(i) = a(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(i)]);
    sorted.col(i) = vectors.col(order[static_cast<std::size_t>(i)]);
  }
  vectors = sorted;
}

// Forward partial Fisher-Yates with the documented modulo draw; mirrors the
// contract of hsdr::sample_indices without sharing code.
inline std::vector<Index> fisher_yates_prefix(Index population, Index n,
                                              std::uint64_t seed) {
  std::vector<Index> idx(static_cast<std::size_t>(population));
  for (Index i = 0; i < population; ++i) idx[static_cast<std::size_t>(i)] = i;
  std::mt19937_64 rng(seed);
  for (Index i = 0; i < n; ++i) {
    const Index j = i + static_cast<Index>(rng() % static_cast<std::uint64_t>(population - i));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(n));
  return idx;
}

inline Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<Scalar> dist(0.0, 1.0);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
  return m;
}

inline Matrix random_matrix_of_rank(Index rows, Index cols, Index rank,
                                    std::uint64_t seed) {
  if (rank == 0) return Matrix::Zero(rows, cols);
  return random_matrix(rows, rank, seed) * random_matrix(rank, cols, seed + 1);
}

inline Matrix random_spd(Index n, std::uint64_t seed) {
  Matrix a = random_matrix(n, n, seed);
  return a * a.transpose() + Matrix::Identity(n, n) * 0.5;
}

}  // namespace oracle
