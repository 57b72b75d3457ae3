#include "hsdr/reducers.hpp"

#include "reducer_common.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace hsdr {

namespace {

Matrix sigmoid(const Matrix& a) {
  return (1.0 / (1.0 + (-a.array()).exp())).matrix();
}

Matrix affine_sigmoid(const Matrix& x, const Matrix& w, const Vector& b) {
  return sigmoid(((x * w).rowwise() + b.transpose()).eval());
}

Matrix sign_of(const Matrix& w) {
  return w.unaryExpr([](Scalar v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); });
}

std::vector<Index> shuffled_indices(Index n, std::mt19937_64& rng) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (Index i = n - 1; i > 0; --i) {
    const Index j = static_cast<Index>(rng() % static_cast<std::uint64_t>(i + 1));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  return idx;
}

Matrix gather_rows(const Matrix& x, const std::vector<Index>& idx, Index at,
                   Index count) {
  Matrix out(count, x.cols());
  for (Index i = 0; i < count; ++i)
    out.row(i) = x.row(idx[static_cast<std::size_t>(at + i)]);
  return out;
}

// Mean-field contrastive divergence for one RBM (visible v-dim, hidden
// h-dim). Updates weights, hidden bias and visible bias in place.
void pretrain_rbm(const Matrix& data, Matrix& w, Vector& hidden_bias,
                  Vector& visible_bias, const FitConfig& cfg,
                  std::mt19937_64& rng) {
  const Index n = data.rows();
  Matrix vel_w = Matrix::Zero(w.rows(), w.cols());
  Vector vel_h = Vector::Zero(hidden_bias.size());
  Vector vel_v = Vector::Zero(visible_bias.size());

  for (int epoch = 0; epoch < cfg.dbn_pretrain_epochs; ++epoch) {
    const std::vector<Index> order = shuffled_indices(n, rng);
    for (Index at = 0; at < n; at += cfg.dbn_batch) {
      const Index m = std::min<Index>(cfg.dbn_batch, n - at);
      const Matrix x0 = gather_rows(data, order, at, m);
      const Matrix y0 = affine_sigmoid(x0, w, hidden_bias);

      Matrix xi = x0, yi = y0;
      for (int t = 0; t < cfg.dbn_chain; ++t) {
        xi = affine_sigmoid(yi, w.transpose(), visible_bias);
        yi = affine_sigmoid(xi, w, hidden_bias);
      }

      const Scalar inv_m = 1.0 / static_cast<Scalar>(m);
      const Matrix dw = (x0.transpose() * y0 - xi.transpose() * yi) * inv_m;
      const Vector dh = (y0 - yi).colwise().mean().transpose();
      const Vector dv = (x0 - xi).colwise().mean().transpose();

      vel_w = cfg.dbn_momentum * vel_w +
              cfg.dbn_lr_pretrain * (dw - cfg.dbn_l1 * sign_of(w));
      vel_h = cfg.dbn_momentum * vel_h + cfg.dbn_lr_pretrain * dh;
      vel_v = cfg.dbn_momentum * vel_v + cfg.dbn_lr_pretrain * dv;
      w += vel_w;
      hidden_bias += vel_h;
      visible_bias += vel_v;
    }
  }
}

}  // namespace

namespace detail {

double dbn_loss_and_grad(const Matrix& s, const DbnWeights& w, double l1,
                         DbnGradient* grad) {
  const Scalar denom = static_cast<Scalar>(s.rows()) * static_cast<Scalar>(s.cols());
  const Matrix hidden = affine_sigmoid(s, w.w0, w.b0);
  const Matrix out = affine_sigmoid(hidden, w.w1, w.b1);
  const Matrix err = out - s;
  double loss = err.squaredNorm() / denom;
  loss += l1 * (w.w0.cwiseAbs().sum() + w.w1.cwiseAbs().sum());
  if (!grad) return loss;

  const Matrix d_out =
      (2.0 / denom) * err.cwiseProduct(out).cwiseProduct((1.0 - out.array()).matrix());
  grad->w1 = hidden.transpose() * d_out + l1 * sign_of(w.w1);
  grad->b1 = d_out.colwise().sum().transpose();
  const Matrix d_hidden = (d_out * w.w1.transpose())
                              .cwiseProduct(hidden)
                              .cwiseProduct((1.0 - hidden.array()).matrix());
  grad->w0 = s.transpose() * d_hidden + l1 * sign_of(w.w0);
  grad->b0 = d_hidden.colwise().sum().transpose();
  return loss;
}

}  // namespace detail

FittedReducer fit_dbn(const Matrix& x, const FitConfig& cfg) {
  detail::validate_fit_input(x, cfg, 1);
  const double tol = detail::effective_tol(cfg, 1e-5);
  const int max_epochs = detail::effective_max_iter(cfg, 200);
  if (cfg.dbn_chain < 1) throw InvalidInput("fit_dbn: chain length must be >= 1");
  if (cfg.dbn_batch < 1) throw InvalidInput("fit_dbn: batch size must be >= 1");
  detail::FitTimer timer;

  const Index n = x.rows();
  const Index d = x.cols();
  const Index r = cfg.r;

  FittedReducer m;
  m.method = Method::dbn;
  m.d = d;
  m.r = r;
  m.seed = cfg.seed;
  m.centers_data = false;

  // Min-max scale per band over the training sample.
  m.dbn.feature_min = x.colwise().minCoeff().transpose();
  m.dbn.feature_max = x.colwise().maxCoeff().transpose();
  Matrix s(n, d);
  for (Index c = 0; c < d; ++c) {
    const Scalar span = m.dbn.feature_max(c) - m.dbn.feature_min(c);
    if (span > 0)
      s.col(c) = (x.col(c).array() - m.dbn.feature_min(c)) / span;
    else
      s.col(c).setConstant(0.5);
  }

  std::mt19937_64 rng(detail::mix_seed(cfg.seed, 0xdb0));
  const Scalar bound = 1.0 / std::sqrt(static_cast<Scalar>(d));
  std::uniform_real_distribution<Scalar> init(-bound, bound);
  m.dbn.w0.resize(d, r);
  m.dbn.w1.resize(r, d);
  for (Index j = 0; j < r; ++j)
    for (Index i = 0; i < d; ++i) m.dbn.w0(i, j) = init(rng);
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < r; ++i) m.dbn.w1(i, j) = init(rng);
  m.dbn.b0 = Vector::Zero(r);
  m.dbn.b1 = Vector::Zero(d);

  // Layer-by-layer contrastive divergence, then autoencoder fine-tuning.
  Vector c0 = Vector::Zero(d);
  pretrain_rbm(s, m.dbn.w0, m.dbn.b0, c0, cfg, rng);
  const Matrix hidden = affine_sigmoid(s, m.dbn.w0, m.dbn.b0);
  Vector c1 = Vector::Zero(r);
  pretrain_rbm(hidden, m.dbn.w1, m.dbn.b1, c1, cfg, rng);

  const double initial_loss = detail::dbn_loss_and_grad(s, m.dbn, cfg.dbn_l1, nullptr);
  double last_loss = initial_loss;

  Matrix vel_w0 = Matrix::Zero(d, r), vel_w1 = Matrix::Zero(r, d);
  Vector vel_b0 = Vector::Zero(r), vel_b1 = Vector::Zero(d);
  detail::DbnGradient grad;

  for (int epoch = 0; epoch < max_epochs; ++epoch) {
    const std::vector<Index> order = shuffled_indices(n, rng);
    for (Index at = 0; at < n; at += cfg.dbn_batch) {
      const Index mrows = std::min<Index>(cfg.dbn_batch, n - at);
      const Matrix batch = gather_rows(s, order, at, mrows);
      detail::dbn_loss_and_grad(batch, m.dbn, cfg.dbn_l1, &grad);
      vel_w0 = cfg.dbn_momentum * vel_w0 - cfg.dbn_lr_finetune * grad.w0;
      vel_b0 = cfg.dbn_momentum * vel_b0 - cfg.dbn_lr_finetune * grad.b0;
      vel_w1 = cfg.dbn_momentum * vel_w1 - cfg.dbn_lr_finetune * grad.w1;
      vel_b1 = cfg.dbn_momentum * vel_b1 - cfg.dbn_lr_finetune * grad.b1;
      m.dbn.w0 += vel_w0;
      m.dbn.b0 += vel_b0;
      m.dbn.w1 += vel_w1;
      m.dbn.b1 += vel_b1;
    }
    const double loss = detail::dbn_loss_and_grad(s, m.dbn, cfg.dbn_l1, nullptr);
    if (!std::isfinite(loss) || loss > 10.0 * initial_loss)
      throw NumericalFailure("fit_dbn: training diverged at epoch " +
                             std::to_string(epoch));
    const bool done = std::abs(last_loss - loss) <= tol * std::max(last_loss, 1e-300);
    last_loss = loss;
    if (done) break;
  }

  m.fit_seconds = timer.seconds();
  return m;
}

}  // namespace hsdr
