#include "hsdr/numerics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace hsdr::numerics {

namespace {

void require_finite(const Matrix& a, const char* who) {
  if (!a.allFinite()) throw InvalidInput(std::string(who) + ": non-finite input");
}

void require_symmetric(const Matrix& a, const char* who) {
  if (a.rows() != a.cols())
    throw InvalidInput(std::string(who) + ": matrix is not square");
  const Scalar scale = std::max<Scalar>(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw InvalidInput(std::string(who) + ": matrix is not symmetric");
}

EigResult order_eig(const Eigen::SelfAdjointEigenSolver<Matrix>& es, bool ascending) {
  EigResult r;
  r.eigenvalues = es.eigenvalues();  // Eigen returns ascending order
  r.eigenvectors = es.eigenvectors();
  if (!ascending) {
    r.eigenvalues.reverseInPlace();
    r.eigenvectors = r.eigenvectors.rowwise().reverse().eval();
  }
  return r;
}

}  // namespace

SvdResult svd(const Matrix& a) {
  if (a.rows() < 1 || a.cols() < 1) throw InvalidInput("svd: empty matrix");
  require_finite(a, "svd");
  Eigen::BDCSVD<Matrix> dec(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success)
    throw NumericalFailure("svd: decomposition did not converge");
  SvdResult r;
  r.u = dec.matrixU();
  r.singular_values = dec.singularValues();
  r.vt = dec.matrixV().transpose();
  return r;
}

EigResult sym_eig(const Matrix& a, bool ascending) {
  require_finite(a, "sym_eig");
  require_symmetric(a, "sym_eig");
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success)
    throw NumericalFailure("sym_eig: iteration did not converge");
  return order_eig(es, ascending);
}

EigResult gen_sym_eig(const Matrix& a, const Matrix& b, bool ascending) {
  require_finite(a, "gen_sym_eig");
  require_finite(b, "gen_sym_eig");
  require_symmetric(a, "gen_sym_eig");
  require_symmetric(b, "gen_sym_eig");
  if (a.rows() != b.rows())
    throw InvalidInput("gen_sym_eig: dimension mismatch between a and b");

  const Index n = b.rows();
  Matrix b_reg = b;
  b_reg.diagonal().array() += 1e-10 * b.trace() / static_cast<Scalar>(n);
  Eigen::LLT<Matrix> llt(b_reg);
  if (llt.info() != Eigen::Success)
    throw NumericalFailure("gen_sym_eig: b is singular beyond regularization");

  // Whiten: M = L^-1 A L^-T, solve the standard problem, map back.
  const auto lower = llt.matrixL();
  Matrix m = lower.solve(a);
  m = lower.solve(m.transpose().eval());
  m = ((m + m.transpose()) * 0.5).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success)
    throw NumericalFailure("gen_sym_eig: iteration did not converge");
  EigResult r = order_eig(es, ascending);
  r.eigenvectors = llt.matrixU().solve(r.eigenvectors);
  return r;
}

Matrix pinv(const Matrix& a) {
  require_finite(a, "pinv");
  if (a.rows() == 0 || a.cols() == 0) return Matrix(a.cols(), a.rows());
  SvdResult dec = svd(a);
  const Scalar tol = std::numeric_limits<Scalar>::epsilon() *
                     static_cast<Scalar>(std::max(a.rows(), a.cols())) *
                     dec.singular_values(0);
  Vector inv = Vector::Zero(dec.singular_values.size());
  for (Index i = 0; i < inv.size(); ++i)
    if (dec.singular_values(i) > tol) inv(i) = 1.0 / dec.singular_values(i);
  return dec.vt.transpose() * inv.asDiagonal() * dec.u.transpose();
}

Vector nnls_gram(const Matrix& ata, const Vector& atb) {
  const Index n = ata.cols();
  if (n < 1) throw InvalidInput("nnls: matrix has no columns");
  if (ata.rows() != n || atb.size() != n)
    throw InvalidInput("nnls: normal-equation dimension mismatch");

  Vector x = Vector::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  Vector w = atb;  // -gradient of 0.5||Ax-b||^2 at x = 0

  const Scalar tol = 1e-11 * std::max<Scalar>(1.0, atb.cwiseAbs().maxCoeff());
  const int max_outer = 3 * static_cast<int>(n);
  int solves = 0;

  auto solve_passive = [&](Vector& z) {
    std::vector<Index> idx;
    for (Index i = 0; i < n; ++i)
      if (passive[static_cast<std::size_t>(i)]) idx.push_back(i);
    const Index p = static_cast<Index>(idx.size());
    Matrix g(p, p);
    Vector f(p);
    for (Index r = 0; r < p; ++r) {
      f(r) = atb(idx[static_cast<std::size_t>(r)]);
      for (Index c = 0; c < p; ++c)
        g(r, c) = ata(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(c)]);
    }
    Vector zp = g.ldlt().solve(f);
    z.setZero();
    for (Index r = 0; r < p; ++r) z(idx[static_cast<std::size_t>(r)]) = zp(r);
  };

  for (int outer = 0; outer < max_outer; ++outer) {
    Index j = -1;
    Scalar best = tol;
    for (Index i = 0; i < n; ++i)
      if (!passive[static_cast<std::size_t>(i)] && w(i) > best) {
        best = w(i);
        j = i;
      }
    if (j < 0) return x;  // KKT satisfied
    passive[static_cast<std::size_t>(j)] = true;

    Vector z(n);
    while (true) {
      if (++solves > 3 * max_outer)
        throw NumericalFailure("nnls: iteration cap exceeded");
      solve_passive(z);
      bool all_positive = true;
      Scalar alpha = 1.0;
      for (Index i = 0; i < n; ++i) {
        if (!passive[static_cast<std::size_t>(i)] || z(i) > 0) continue;
        all_positive = false;
        const Scalar step = x(i) / (x(i) - z(i));
        alpha = std::min(alpha, step);
      }
      if (all_positive) {
        x = z;
        break;
      }
      x += alpha * (z - x);
      for (Index i = 0; i < n; ++i)
        if (passive[static_cast<std::size_t>(i)] && x(i) <= 1e-14) {
          x(i) = 0.0;
          passive[static_cast<std::size_t>(i)] = false;
        }
    }
    w = atb - ata * x;
  }
  throw NumericalFailure("nnls: iteration cap exceeded");
}

Vector nnls(const Matrix& a, const Vector& b) {
  require_finite(a, "nnls");
  if (a.cols() < 1) throw InvalidInput("nnls: matrix has no columns");
  if (b.size() != a.rows()) throw InvalidInput("nnls: rhs length mismatch");
  if (!b.allFinite()) throw InvalidInput("nnls: non-finite rhs");
  return nnls_gram(a.transpose() * a, a.transpose() * b);
}

}  // namespace hsdr::numerics
