#pragma once

#include "hsdr/core.hpp"

namespace hsdr::numerics {

/// Thin SVD: a == u * singular_values.asDiagonal() * vt, with
/// min(rows, cols) singular values sorted descending.
struct SvdResult {
  Matrix u;
  Vector singular_values;
  Matrix vt;
};

/// Eigenpairs of a (generalized) symmetric problem, one eigenvector per
/// column, sorted by eigenvalue in the requested order.
struct EigResult {
  Vector eigenvalues;
  Matrix eigenvectors;
};

SvdResult svd(const Matrix& a);

/// Standard symmetric eigenproblem. `a` must be symmetric within 1e-10
/// (relative to its largest entry).
EigResult sym_eig(const Matrix& a, bool ascending = true);

/// Generalized problem A v = lambda B v for symmetric A and positive
/// semi-definite B. B is regularized by 1e-10 * trace(B)/n * I before the
/// Cholesky factorization; if it is singular beyond that, the data behind
/// it is degenerate and NumericalFailure is thrown. Eigenvectors are
/// B-orthonormal.
EigResult gen_sym_eig(const Matrix& a, const Matrix& b, bool ascending = true);

/// Moore-Penrose pseudoinverse. Matrices with zero rows or columns are
/// allowed and produce the transposed-shape empty result.
Matrix pinv(const Matrix& a);

/// Nonnegative least squares: argmin ||a x - b|| subject to x >= 0,
/// Lawson-Hanson active set with an iteration cap of 3 * cols.
Vector nnls(const Matrix& a, const Vector& b);

/// nnls on precomputed normal equations (ata = a^T a, atb = a^T b).
/// Shared by nnls() and callers that solve many right-hand sides
/// against one matrix.
Vector nnls_gram(const Matrix& ata, const Vector& atb);

}  // namespace hsdr::numerics
