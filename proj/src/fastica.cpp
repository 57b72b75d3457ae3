#include "hsdr/numerics.hpp"
#include "hsdr/reducers.hpp"

#include "reducer_common.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

namespace hsdr {

namespace {

// W <- W (W^T W)^{-1/2}: makes the unmixing directions exactly orthonormal
// without privileging any of them.
void symmetric_decorrelate(Matrix& w) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(w.transpose() * w);
  if (es.info() != Eigen::Success)
    throw NumericalFailure("fit_fastica: decorrelation failed");
  const Scalar floor = std::max<Scalar>(es.eigenvalues().maxCoeff(), 1e-300) * 1e-30;
  const Vector inv_sqrt =
      es.eigenvalues().cwiseMax(floor).cwiseSqrt().cwiseInverse();
  w = w * es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
}

struct IcaRun {
  Matrix w;          // r x r, rows are unmixing directions in whitened space
  double best_delta = std::numeric_limits<double>::infinity();
  bool converged = false;
};

// Symmetric fixed-point iterations with g(u) = (1/alpha) ln cosh(alpha u):
// g'(u) = tanh(alpha u), g''(u) = alpha (1 - tanh^2(alpha u)).
IcaRun run_fastica(const Matrix& z, Index r, double alpha, double tol,
                   int max_iter, std::uint64_t seed) {
  const Scalar n = static_cast<Scalar>(z.rows());
  std::mt19937_64 rng(seed);
  std::normal_distribution<Scalar> gauss(0.0, 1.0);

  IcaRun run;
  run.w.resize(r, r);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < r; ++j) run.w(i, j) = gauss(rng);
  symmetric_decorrelate(run.w);

  Matrix best = run.w;
  for (int iter = 0; iter < max_iter; ++iter) {
    const Matrix u = z * run.w.transpose();            // N x r
    const Matrix g1 = (alpha * u.array()).tanh();      // g'
    const Vector g2_mean =
        (alpha * (1.0 - g1.array().square())).colwise().mean().transpose();
    Matrix next = (g1.transpose() * z) / n - g2_mean.asDiagonal() * run.w;
    symmetric_decorrelate(next);

    double delta = 0.0;
    for (Index i = 0; i < r; ++i) {
      Scalar dot = next.row(i).dot(run.w.row(i));
      if (dot < 0) {  // direction signs are arbitrary
        next.row(i) = -next.row(i);
        dot = -dot;
      }
      delta = std::max(delta, std::abs(static_cast<double>(dot) - 1.0));
    }
    run.w = next;
    if (delta < run.best_delta) {
      run.best_delta = delta;
      best = run.w;
    }
    if (delta <= tol) {
      run.converged = true;
      return run;
    }
  }
  run.w = best;
  return run;
}

}  // namespace

FittedReducer fit_fastica(const Matrix& x, const FitConfig& cfg) {
  detail::validate_fit_input(x, cfg, 1);
  if (x.rows() <= cfg.r)
    throw InvalidInput("fit_fastica: need more pixels than components");
  const double tol = detail::effective_tol(cfg, 1e-4);
  const int max_iter = detail::effective_max_iter(cfg, 200);
  detail::FitTimer timer;

  FittedReducer m;
  m.method = Method::fastica;
  m.d = x.cols();
  m.r = cfg.r;
  m.seed = cfg.seed;
  m.centers_data = true;
  m.mean = x.colwise().mean().transpose();

  const Matrix xc = x.rowwise() - m.mean.transpose();
  if (xc.cwiseAbs().maxCoeff() == 0.0)
    throw DegenerateData("fit_fastica: all pixels identical");

  // Whitening restricted to the top-r principal subspace.
  const auto dec =
      numerics::svd(xc / std::sqrt(static_cast<Scalar>(x.rows() - 1)));
  if (dec.singular_values(cfg.r - 1) <= 1e-12 * dec.singular_values(0))
    throw DegenerateData("fit_fastica: data rank below r, cannot whiten");
  const Matrix whitener =
      dec.vt.topRows(cfg.r).transpose() *
      dec.singular_values.head(cfg.r).cwiseInverse().asDiagonal();  // d x r
  const Matrix z = xc * whitener;  // unit sample covariance

  IcaRun run = run_fastica(z, cfg.r, cfg.ica_alpha, tol, max_iter,
                           detail::mix_seed(cfg.seed, 0x1ca));
  if (!run.converged) {
    // one restart with a fresh starting point
    IcaRun retry = run_fastica(z, cfg.r, cfg.ica_alpha, tol, max_iter,
                               detail::mix_seed(cfg.seed, 0x1cb));
    if (retry.converged || retry.best_delta < run.best_delta) run = retry;
  }

  m.not_converged = !run.converged;
  m.linear_w = whitener * run.w.transpose();
  m.fit_seconds = timer.seconds();
  return m;
}

}  // namespace hsdr
