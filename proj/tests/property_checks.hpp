#pragma once

// Property checks shared between the per-module unit suites and the
// acceptance runner.

#include "hsdr/numerics.hpp"
#include "hsdr/reducers.hpp"

#include <cmath>

namespace checks {

using hsdr::Index;
using hsdr::Matrix;
using hsdr::Scalar;
using hsdr::Vector;

// Orthogonal projector onto the column span of w.
inline Matrix span_projector(const Matrix& w) {
  return w * hsdr::numerics::pinv(w);
}

inline double projector_gap(const Matrix& wa, const Matrix& wb) {
  return (span_projector(wa) - span_projector(wb)).norm();
}

// ||P^2 - P||_F for P = I - omega omega+ built from the first `cols`
// columns of omega.
inline double osp_projector_idempotence_gap(const Matrix& omega, Index cols) {
  const Matrix prefix = omega.leftCols(cols);
  const Matrix p = Matrix::Identity(omega.rows(), omega.rows()) -
                   prefix * hsdr::numerics::pinv(prefix);
  return (p * p - p).norm();
}

inline bool nonincreasing(const std::vector<double>& seq, double slack) {
  for (std::size_t i = 1; i < seq.size(); ++i)
    if (seq[i] > seq[i - 1] + slack) return false;
  return true;
}

// Central finite differences of the DBN autoencoder loss with respect to
// every parameter; returns the worst relative error against the analytic
// gradient.
inline double dbn_gradient_relative_error(const Matrix& s,
                                          const hsdr::DbnWeights& weights,
                                          double step) {
  hsdr::detail::DbnGradient grad;
  hsdr::detail::dbn_loss_and_grad(s, weights, 0.0, &grad);

  double worst = 0.0;
  hsdr::DbnWeights w = weights;
  auto probe = [&](Scalar* cell, double analytic) {
    const Scalar saved = *cell;
    *cell = saved + step;
    const double up = hsdr::detail::dbn_loss_and_grad(s, w, 0.0, nullptr);
    *cell = saved - step;
    const double down = hsdr::detail::dbn_loss_and_grad(s, w, 0.0, nullptr);
    *cell = saved;
    const double numeric = (up - down) / (2 * step);
    const double denom = std::max({std::abs(numeric), std::abs(analytic), 1e-8});
    worst = std::max(worst, std::abs(numeric - analytic) / denom);
  };
  for (Index i = 0; i < w.w0.rows(); ++i)
    for (Index j = 0; j < w.w0.cols(); ++j) probe(&w.w0(i, j), grad.w0(i, j));
  for (Index i = 0; i < w.b0.size(); ++i) probe(&w.b0(i), grad.b0(i));
  for (Index i = 0; i < w.w1.rows(); ++i)
    for (Index j = 0; j < w.w1.cols(); ++j) probe(&w.w1(i, j), grad.w1(i, j));
  for (Index i = 0; i < w.b1.size(); ++i) probe(&w.b1(i), grad.b1(i));
  return worst;
}

}  // namespace checks
