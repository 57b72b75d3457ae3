#include "hsdr/numerics.hpp"
#include "hsdr/reducers.hpp"

#include "reducer_common.hpp"

#include <cmath>
#include <cstdio>

namespace hsdr {

namespace {

constexpr Scalar kDenominatorGuard = 1e-12;

void normalize_basis(Matrix& w, Matrix& h) {
  // Unit-L2 columns; H absorbs the scale so W H is unchanged.
  for (Index j = 0; j < w.cols(); ++j) {
    const Scalar norm = std::max<Scalar>(w.col(j).norm(), 1e-300);
    w.col(j) /= norm;
    h.row(j) *= norm;
  }
}

}  // namespace

FittedReducer fit_nmf(const Matrix& x, const FitConfig& cfg) {
  detail::validate_fit_input(x, cfg, 1);
  if (x.rows() < cfg.r)
    throw InvalidInput("fit_nmf: need at least r pixels");
  const double tol = detail::effective_tol(cfg, 1e-5);
  const int max_iter = detail::effective_max_iter(cfg, 500);
  detail::FitTimer timer;

  FittedReducer m;
  m.method = Method::nmf;
  m.d = x.cols();
  m.r = cfg.r;
  m.seed = cfg.seed;
  m.centers_data = false;

  Matrix clipped = x;
  if (x.minCoeff() < 0.0) {
    m.clipped_negative_inputs = true;
    std::fprintf(stderr, "fit_nmf: negative entries clipped to zero\n");
    clipped = clipped.cwiseMax(0.0);
  }
  if (clipped.maxCoeff() <= 0.0) throw DegenerateData("fit_nmf: zero input matrix");

  const Matrix v = clipped.transpose();  // d x N, column per pixel

  // OSP picks the initial basis; codes start from nnls against it.
  FitConfig osp_cfg;
  osp_cfg.r = cfg.r;
  osp_cfg.seed = cfg.seed;
  Matrix w = fit_osp(clipped, osp_cfg).linear_w;
  Matrix h(cfg.r, v.cols());
  {
    Matrix dummy = Matrix::Ones(cfg.r, 1);
    normalize_basis(w, dummy);
    const Matrix gram = w.transpose() * w;
    const Matrix rhs = w.transpose() * v;
    for (Index i = 0; i < v.cols(); ++i)
      h.col(i) = numerics::nnls_gram(gram, rhs.col(i));
  }

  const Scalar v_norm = std::max<Scalar>(v.norm(), 1e-300);
  Scalar objective = (v - w * h).norm();
  m.nmf_objective_history.push_back(objective);

  for (int iter = 0; iter < max_iter; ++iter) {
    h.array() *= (w.transpose() * v).array() /
                 (((w.transpose() * w) * h).array() + kDenominatorGuard);
    w.array() *= (v * h.transpose()).array() /
                 ((w * (h * h.transpose())).array() + kDenominatorGuard);
    normalize_basis(w, h);

    const Scalar next = (v - w * h).norm();
    m.nmf_objective_history.push_back(next);
    const bool done = std::abs(objective - next) <= tol * std::max<Scalar>(objective, 1e-300);
    objective = next;
    if (done) break;
  }

  m.nmf_basis = w;
  m.nmf_fit_residual = objective / v_norm;
  m.fit_seconds = timer.seconds();
  return m;
}

}  // namespace hsdr
