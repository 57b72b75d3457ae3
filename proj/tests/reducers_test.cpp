#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hsdr/metrics.hpp"
#include "hsdr/numerics.hpp"
#include "hsdr/reducers.hpp"
#include "hsdr/sampling.hpp"
#include "oracles.hpp"
#include "property_checks.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

using namespace hsdr;

namespace {

FitConfig make_cfg(Index r, std::uint64_t seed = 0) {
  FitConfig cfg;
  cfg.r = r;
  cfg.seed = seed;
  return cfg;
}

bool same_model_payload(const FittedReducer& a, const FittedReducer& b) {
  auto eq = [](const Matrix& x, const Matrix& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() &&
           (x.size() == 0 || (x - y).cwiseAbs().maxCoeff() == 0.0);
  };
  return a.method == b.method && a.r == b.r && a.d == b.d &&
         eq(a.linear_w, b.linear_w) && eq(a.mean, b.mean) &&
         eq(a.nmf_basis, b.nmf_basis) && eq(a.dbn.w0, b.dbn.w0) &&
         eq(a.dbn.b0, b.dbn.b0) && eq(a.dbn.w1, b.dbn.w1) && eq(a.dbn.b1, b.dbn.b1);
}

}  // namespace

TEST_CASE("pca: two-point cloud, sign convention and explained variance") {
  Matrix x(2, 3);
  x << 1, 0, 0,
      -1, 0, 0;
  const FittedReducer m = fit_pca(x, make_cfg(1));
  CHECK(std::abs(m.linear_w(0, 0) - 1.0) <= 1e-12);
  CHECK(std::abs(m.linear_w(1, 0)) <= 1e-12);
  CHECK(std::abs(m.linear_w(2, 0)) <= 1e-12);
  const Matrix z = encode(m, x);
  const double variance = z.col(0).squaredNorm() / (2.0 - 1.0);
  CHECK(variance == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("pca: complete basis reconstructs exactly") {
  const Matrix x = oracle::random_matrix(40, 8, 3);
  const FittedReducer m = fit_pca(x, make_cfg(8));
  CHECK(reconstruction_error(x, m) <= 1e-10);
}

TEST_CASE("pca: encoded variances match the covariance-eigen oracle") {
  const Matrix x = oracle::random_matrix(80, 6, 5);
  const FittedReducer m = fit_pca(x, make_cfg(6));
  const Matrix z = encode(m, x);

  const Matrix xc = x.rowwise() - x.colwise().mean();
  Vector evals;
  Matrix evecs;
  oracle::jacobi_eig((xc.transpose() * xc) / (80.0 - 1.0), evals, evecs);
  for (Index k = 0; k < 6; ++k) {
    const double variance = z.col(k).squaredNorm() / (80.0 - 1.0);
    CHECK(std::abs(variance - evals(5 - k)) <= 1e-8);
  }
}

TEST_CASE("pca: uncorrelated components, monotone reconstruction, mean encodes to zero") {
  const Matrix x = oracle::random_matrix(60, 7, 8);
  const FittedReducer full = fit_pca(x, make_cfg(7));
  const Matrix z = encode(full, x);
  const Matrix zc = z.rowwise() - z.colwise().mean();
  const Matrix cov = zc.transpose() * zc / (60.0 - 1.0);
  const double max_diag = cov.diagonal().maxCoeff();
  for (Index i = 0; i < 7; ++i)
    for (Index j = 0; j < 7; ++j)
      if (i != j) CHECK(std::abs(cov(i, j)) <= 1e-8 * max_diag);

  double previous = std::numeric_limits<double>::infinity();
  for (Index r = 0; r <= 7; ++r) {
    const double e = reconstruction_error(x, fit_pca(x, make_cfg(r)));
    CHECK(e <= previous + 1e-12);
    previous = e;
  }

  const Matrix mean_pixel = x.colwise().mean();
  CHECK(encode(full, mean_pixel).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("pca: identical pixels are degenerate") {
  Matrix x = Matrix::Ones(5, 3);
  CHECK_THROWS_AS(fit_pca(x, make_cfg(1)), DegenerateData);
}

TEST_CASE("pca_cs: exact low-rank data recovers the pca subspace") {
  const Matrix x =
      oracle::random_matrix(200, 3, 31) * oracle::random_matrix(3, 10, 32);
  FitConfig cfg = make_cfg(3, 4);
  const FittedReducer cs = fit_pca_cs(x, cfg);
  const FittedReducer exact = fit_pca(x, cfg);
  CHECK(checks::projector_gap(cs.linear_w, exact.linear_w) <= 1e-6);
}

TEST_CASE("pca_cs: all columns reduce to exact pca") {
  const Matrix x = oracle::random_matrix(100, 6, 35);
  FitConfig cfg = make_cfg(6, 9);
  cfg.cs_columns = 6;
  const FittedReducer cs = fit_pca_cs(x, cfg);
  const FittedReducer exact = fit_pca(x, cfg);
  CHECK(checks::projector_gap(cs.linear_w, exact.linear_w) <= 1e-8);
}

TEST_CASE("pca_cs: rank-deficient sampled block fails") {
  // rank-1 data: every 2x2 block of the covariance is singular
  const Matrix x =
      oracle::random_matrix(50, 1, 36) * oracle::random_matrix(1, 8, 37);
  CHECK_THROWS_AS(fit_pca_cs(x, make_cfg(2, 1)), NumericalFailure);
}

TEST_CASE("fastica: recovers independent uniform sources") {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<Scalar> u(-1.0, 1.0);
  Matrix sources(2000, 2);
  for (Index i = 0; i < sources.rows(); ++i) {
    sources(i, 0) = u(rng);
    sources(i, 1) = u(rng);
  }
  Matrix mix(2, 2);
  mix << 0.8, -0.3,
         0.5, 0.9;
  const Matrix x = sources * mix.transpose();

  const FittedReducer m = fit_fastica(x, make_cfg(2, 1));
  REQUIRE_FALSE(m.not_converged);
  const Matrix z = encode(m, x);

  // match recovered columns to sources by best absolute Pearson correlation
  auto corr = [&](Index a, Index b) {
    const Vector za = (z.col(a).array() - z.col(a).mean()).matrix();
    const Vector sb = (sources.col(b).array() - sources.col(b).mean()).matrix();
    return std::abs(za.dot(sb) / (za.norm() * sb.norm()));
  };
  const double direct = std::min(corr(0, 0), corr(1, 1));
  const double swapped = std::min(corr(0, 1), corr(1, 0));
  CHECK(std::max(direct, swapped) >= 0.95);
}

TEST_CASE("fastica: spans the top-r pca subspace and matches its reconstruction") {
  const Matrix x = oracle::random_matrix(300, 9, 41) *
                       oracle::random_matrix(9, 9, 42) +
                   0.01 * oracle::random_matrix(300, 9, 43);
  for (Index r : {2, 4}) {
    const FittedReducer ica = fit_fastica(x, make_cfg(r, 2));
    const FittedReducer pca = fit_pca(x, make_cfg(r, 2));
    CHECK(checks::projector_gap(ica.linear_w, pca.linear_w) <= 1e-6);
    CHECK(std::abs(reconstruction_error(x, ica) - reconstruction_error(x, pca)) <=
          1e-8);

    // unmixing directions stay orthonormal in whitened coordinates
    const Matrix z = encode(ica, x);
    const Matrix zc = z.rowwise() - z.colwise().mean();
    const Matrix cov = zc.transpose() * zc / (static_cast<double>(x.rows()) - 1.0);
    CHECK((cov - Matrix::Identity(r, r)).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("fastica: iteration cap flags the returned best iterate") {
  const Matrix x = oracle::random_matrix(100, 5, 51);
  FitConfig cfg = make_cfg(3, 1);
  cfg.max_iter = 1;
  cfg.tol = 1e-15;
  const FittedReducer m = fit_fastica(x, cfg);
  CHECK(m.not_converged);
  CHECK(m.linear_w.allFinite());
}

TEST_CASE("osp: first target is the max-norm pixel, e1 is annihilated") {
  Matrix x = Matrix::Zero(4, 3);
  x << 1, 0, 0,
       0, 0.5, 0,
       0.2, 0.1, 0,
       0, 0, 0.3;
  const FittedReducer m = fit_osp(x, make_cfg(2));
  CHECK((m.linear_w.col(0) - Vector::Unit(3, 0)).cwiseAbs().maxCoeff() == 0.0);

  const Matrix omega1 = m.linear_w.leftCols(1);
  const Matrix p =
      Matrix::Identity(3, 3) - omega1 * numerics::pinv(omega1);
  CHECK((p * Vector::Unit(3, 0)).norm() <= 1e-12);
}

TEST_CASE("osp: matches a brute-force projector oracle and picks pure pixels") {
  // simplex data: three scaled orthogonal pure spectra plus interior mixtures
  Matrix x(9, 5);
  x.setZero();
  x(0, 0) = 3.0;
  x(1, 1) = 2.5;
  x(2, 2) = 2.0;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<Scalar> u(0.1, 0.9);
  for (Index i = 3; i < 9; ++i) {
    Vector w(3);
    w << u(rng), u(rng), u(rng);
    w /= w.sum();
    x.row(i) = w(0) * x.row(0) + w(1) * x.row(1) + w(2) * x.row(2);
  }

  const FittedReducer m = fit_osp(x, make_cfg(3));

  // brute force: recompute the selection with explicit pseudoinverse projectors
  Matrix omega(5, 0);
  std::vector<Index> expected;
  for (int step = 0; step < 3; ++step) {
    const Matrix p = Matrix::Identity(5, 5) - omega * numerics::pinv(omega);
    Index best = 0;
    double best_norm = -1.0;
    for (Index j = 0; j < 9; ++j) {
      const double norm = (p * x.row(j).transpose()).squaredNorm();
      if (norm > best_norm + 1e-15) {
        best_norm = norm;
        best = j;
      }
    }
    expected.push_back(best);
    omega.conservativeResize(5, omega.cols() + 1);
    omega.col(omega.cols() - 1) = x.row(best).transpose();
  }

  CHECK(expected == std::vector<Index>{0, 1, 2});
  for (int step = 0; step < 3; ++step)
    CHECK((m.linear_w.col(step) - x.row(expected[static_cast<std::size_t>(step)])
                                      .transpose())
              .cwiseAbs()
              .maxCoeff() == 0.0);

  for (Index cols = 1; cols <= 3; ++cols)
    CHECK(checks::osp_projector_idempotence_gap(m.linear_w, cols) <= 1e-8);

  CHECK(encode(m, Matrix::Zero(2, 5)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("osp: rank exhaustion is degenerate") {
  const Matrix x =
      oracle::random_matrix(20, 2, 61) * oracle::random_matrix(2, 6, 62);
  CHECK_THROWS_AS(fit_osp(x, make_cfg(4)), DegenerateData);
}

TEST_CASE("lpp: collinear triple symmetrizes to a path graph") {
  Matrix x(3, 2);
  x << 0.0, 0.0,
       1.0, 0.0,
       2.1, 0.0;  // middle point: nearest is either end; ends: nearest is middle
  const Matrix g = knn_adjacency(x, 1);
  CHECK(g(0, 1) == 1.0);
  CHECK(g(1, 0) == 1.0);
  CHECK(g(1, 2) == 1.0);
  CHECK(g(2, 1) == 1.0);
  CHECK(g(0, 2) == 0.0);
  CHECK(g.diagonal().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lpp: generalized eigen residual contract holds") {
  const Matrix x = oracle::random_matrix(40, 6, 70);
  FitConfig cfg = make_cfg(3, 5);
  const FittedReducer m = fit_lpp(x, cfg);

  // rebuild the graph matrices independently via the dense adjacency
  const Matrix g = knn_adjacency(x, cfg.lpp_k);
  const Vector deg = g.colwise().sum().transpose();
  const Matrix l = Matrix(deg.asDiagonal()) - g;
  const Matrix a = x.transpose() * l * x;
  const Matrix b = x.transpose() * Matrix(deg.asDiagonal()) * x;
  for (Index c = 0; c < m.linear_w.cols(); ++c) {
    const Vector w = m.linear_w.col(c);
    const double lambda = w.dot(a * w) / w.dot(b * w);
    CHECK((a * w - lambda * (b * w)).norm() <= 1e-8 * a.norm());
  }
}

TEST_CASE("lpp: separates two well-separated spectral clusters at r = 1") {
  std::mt19937_64 rng(8);
  std::normal_distribution<Scalar> noise(0.0, 0.05);
  Matrix x(60, 4);
  for (Index i = 0; i < 60; ++i) {
    const bool second = i >= 30;
    for (Index c = 0; c < 4; ++c)
      x(i, c) = (second ? 3.0 : 0.0) + (c == 0 ? 1.0 : 0.2) + noise(rng);
  }
  const FittedReducer m = fit_lpp(x, make_cfg(1, 3));
  const Matrix z = encode(m, x);
  const double max_a = z.topRows(30).maxCoeff();
  const double min_a = z.topRows(30).minCoeff();
  const double max_b = z.bottomRows(30).maxCoeff();
  const double min_b = z.bottomRows(30).minCoeff();
  const bool separated = max_a < min_b || max_b < min_a;
  CHECK(separated);
}

TEST_CASE("lpp: zero data cannot be whitened") {
  CHECK_THROWS_AS(fit_lpp(Matrix::Zero(10, 3), make_cfg(1)), NumericalFailure);
}

TEST_CASE("vsrp: entries take exactly three values with the right density") {
  FitConfig cfg = make_cfg(64, 12);
  const Matrix x = oracle::random_matrix(30, 116, 80);
  const FittedReducer m = fit_vsrp(x, cfg);

  const Scalar c = std::sqrt(116.0);
  const Scalar root_c = std::sqrt(c);
  Index nonzero = 0;
  for (Index i = 0; i < m.linear_w.rows(); ++i)
    for (Index j = 0; j < m.linear_w.cols(); ++j) {
      const Scalar v = m.linear_w(i, j);
      CHECK((v == 0.0 || v == root_c || v == -root_c));
      if (v != 0.0) ++nonzero;
    }
  const double p = 1.0 / c;
  const double count = static_cast<double>(116 * 64);
  const double sd = std::sqrt(p * (1.0 - p) / count);
  CHECK(std::abs(static_cast<double>(nonzero) / count - p) <= 3.0 * sd);

  // data independence: a different dataset with the same seed gives the same W
  const FittedReducer m2 = fit_vsrp(oracle::random_matrix(55, 116, 81), cfg);
  CHECK((m.linear_w - m2.linear_w).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("vsrp: Johnson-Lindenstrauss distance preservation") {
  const Index d = 400, r = 256;
  const Matrix x = oracle::random_matrix(60, d, 90);
  const FittedReducer m = fit_vsrp(x, make_cfg(r, 7));
  const Matrix z = encode(m, x);

  std::mt19937_64 rng(91);
  int within = 0;
  const int pairs = 50;
  for (int t = 0; t < pairs; ++t) {
    const Index a = static_cast<Index>(rng() % 60);
    Index b = static_cast<Index>(rng() % 60);
    if (b == a) b = (b + 1) % 60;
    const double before = (x.row(a) - x.row(b)).squaredNorm();
    const double after = (z.row(a) - z.row(b)).squaredNorm() / static_cast<double>(r);
    const double ratio = after / before;
    if (ratio >= 0.7 && ratio <= 1.3) ++within;
  }
  CHECK(within >= 48);  // >= 95% of 50 pairs
}

TEST_CASE("vsrp: decoding an empty code returns the stored mean") {
  const Matrix x = oracle::random_matrix(12, 5, 95);
  const FittedReducer m = fit_vsrp(x, make_cfg(0, 3));
  const Matrix recon = decode(m, Matrix(12, 0));
  for (Index i = 0; i < 12; ++i)
    CHECK((recon.row(i).transpose() - m.mean).cwiseAbs().maxCoeff() <= 1e-15);
  CHECK(reconstruction_error(x, m) <= 1.0);
}

TEST_CASE("nmf: recovers a constructed exact factorization") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<Scalar> u(0.05, 1.0);
  // pure rows plus convex mixtures: the exact factorization is reachable
  // from the OSP initialization
  Matrix a = Matrix::Zero(60, 3), b(3, 12);
  for (Index j = 0; j < 3; ++j) a(j, j) = 1.5;
  for (Index i = 3; i < a.rows(); ++i) {
    Vector w(3);
    w << u(rng), u(rng), u(rng);
    a.row(i) = w.transpose() / w.sum();
  }
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 12; ++j) b(i, j) = u(rng);
  const Matrix x = a * b;

  FitConfig cfg = make_cfg(3, 2);
  cfg.tol = 1e-10;
  cfg.max_iter = 600;
  const FittedReducer m = fit_nmf(x, cfg);
  CHECK(m.nmf_fit_residual <= 1e-3);

  // basis columns are unit L2 and nonnegative
  for (Index j = 0; j < 3; ++j) {
    CHECK(std::abs(m.nmf_basis.col(j).norm() - 1.0) <= 1e-8);
    CHECK(m.nmf_basis.col(j).minCoeff() >= 0.0);
  }
  CHECK(checks::nonincreasing(m.nmf_objective_history,
                              1e-12 * m.nmf_objective_history.front()));

  // encoding the training data reproduces the stored fit residual
  const Matrix recon = decode(m, encode(m, x));
  const double enc_residual = (x - recon).norm() / x.norm();
  CHECK(std::abs(enc_residual - m.nmf_fit_residual) <= 1e-6);
}

TEST_CASE("nmf: encode against an orthogonal basis gives indicator codes") {
  FittedReducer m;
  m.method = Method::nmf;
  m.d = 6;
  m.r = 3;
  m.nmf_basis = Matrix::Zero(6, 3);
  // disjoint supports, unit columns
  m.nmf_basis(0, 0) = 0.6;
  m.nmf_basis(1, 0) = 0.8;
  m.nmf_basis(2, 1) = 1.0;
  m.nmf_basis(3, 2) = 0.6;
  m.nmf_basis(5, 2) = 0.8;
  for (Index j = 0; j < 3; ++j) {
    const Matrix pixel = m.nmf_basis.col(j).transpose();
    const Matrix code = encode(m, pixel);
    for (Index i = 0; i < 3; ++i)
      CHECK(std::abs(code(0, i) - (i == j ? 1.0 : 0.0)) <= 1e-8);
  }
}

TEST_CASE("nmf: zero input is degenerate, negatives clip with a flag") {
  CHECK_THROWS_AS(fit_nmf(Matrix::Zero(10, 4), make_cfg(2)), DegenerateData);

  Matrix x = oracle::random_matrix(20, 5, 7).cwiseAbs();
  x(0, 0) = -0.5;
  FitConfig cfg = make_cfg(2, 3);
  cfg.max_iter = 10;
  const FittedReducer m = fit_nmf(x, cfg);
  CHECK(m.clipped_negative_inputs);
}

TEST_CASE("dbn: beats the mean predictor on sigmoidal low-rank data") {
  std::mt19937_64 rng(6);
  std::normal_distribution<Scalar> gauss(0.0, 1.0);
  Matrix latent(400, 2), mix(2, 8);
  for (Index i = 0; i < latent.rows(); ++i)
    for (Index j = 0; j < 2; ++j) latent(i, j) = gauss(rng);
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 8; ++j) mix(i, j) = gauss(rng);
  const Matrix x =
      (1.0 / (1.0 + (-(latent * mix)).array().exp())).matrix();

  FitConfig cfg = make_cfg(2, 9);
  cfg.dbn_pretrain_epochs = 5;
  cfg.max_iter = 120;
  const FittedReducer m = fit_dbn(x, cfg);

  const Matrix recon = decode(m, encode(m, x));
  const double model_mse = (x - recon).squaredNorm() / static_cast<double>(x.size());
  const Matrix mean_pred = x.colwise().mean().replicate(x.rows(), 1);
  const double mean_mse =
      (x - mean_pred).squaredNorm() / static_cast<double>(x.size());
  CHECK(model_mse < mean_mse);

  const Matrix z = encode(m, x);
  CHECK(z.minCoeff() > 0.0);
  CHECK(z.maxCoeff() < 1.0);
}

TEST_CASE("dbn: analytic gradient matches central differences") {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<Scalar> u(0.05, 0.95);
  Matrix s(20, 5);
  for (Index i = 0; i < 20; ++i)
    for (Index j = 0; j < 5; ++j) s(i, j) = u(rng);

  DbnWeights w;
  w.w0 = 0.4 * oracle::random_matrix(5, 2, 11);
  w.b0 = 0.1 * oracle::random_matrix(2, 1, 12).col(0);
  w.w1 = 0.4 * oracle::random_matrix(2, 5, 13);
  w.b1 = 0.1 * oracle::random_matrix(5, 1, 14).col(0);
  w.feature_min = Vector::Zero(5);
  w.feature_max = Vector::Ones(5);

  CHECK(checks::dbn_gradient_relative_error(s, w, 1e-5) <= 1e-4);
}

TEST_CASE("dbn: runaway learning rate raises NumericalFailure") {
  // near-constant data keeps the initial loss tiny, so saturating the
  // network blows past the 10x divergence bound
  Matrix x = Matrix::Constant(50, 4, 0.5);
  x += 1e-3 * oracle::random_matrix(50, 4, 15);
  FitConfig cfg = make_cfg(2, 4);
  cfg.dbn_lr_finetune = 80.0;
  cfg.dbn_pretrain_epochs = 0;
  cfg.tol = 1e-300;
  CHECK_THROWS_AS(fit_dbn(x, cfg), NumericalFailure);
}

TEST_CASE("encode/decode: linear maps are affine and validate dimensions") {
  const Matrix x = oracle::random_matrix(50, 6, 20) +
                   oracle::random_matrix(50, 1, 21) * Matrix::Ones(1, 6);
  const std::vector<Method> linear = {Method::pca, Method::pca_cs, Method::fastica,
                                      Method::osp, Method::lpp, Method::vsrp};
  for (Method method : linear) {
    const FittedReducer m = fit(method, x, make_cfg(3, 6));
    const Matrix a = x.topRows(1);
    const Matrix b = x.bottomRows(1);
    const double alpha = 0.3;
    const Matrix mixed = alpha * a + (1.0 - alpha) * b;
    const Matrix lhs = encode(m, mixed);
    const Matrix rhs = alpha * encode(m, a) + (1.0 - alpha) * encode(m, b);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);

    CHECK_THROWS_AS(encode(m, Matrix::Zero(2, 7)), InvalidInput);
    CHECK_THROWS_AS(decode(m, Matrix::Zero(2, 5)), InvalidInput);
  }
}

TEST_CASE("encode/decode: pca round trips at full rank") {
  const Matrix x = oracle::random_matrix(30, 5, 23);
  const FittedReducer m = fit_pca(x, make_cfg(5, 1));
  const Matrix recon = decode(m, encode(m, x));
  CHECK((recon - x).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("fits are deterministic given data and config") {
  const Matrix x = oracle::random_matrix(80, 10, 25).cwiseAbs();
  for (Method method : {Method::pca, Method::pca_cs, Method::fastica, Method::osp,
                        Method::lpp, Method::vsrp, Method::nmf, Method::dbn}) {
    FitConfig cfg = make_cfg(3, 11);
    if (method == Method::nmf) cfg.max_iter = 30;
    if (method == Method::dbn) {
      cfg.max_iter = 5;
      cfg.dbn_pretrain_epochs = 2;
    }
    const FittedReducer a = fit(method, x, cfg);
    const FittedReducer b = fit(method, x, cfg);
    CHECK(same_model_payload(a, b));
  }
}

TEST_CASE("reducer container round trips through disk") {
  const Matrix x = oracle::random_matrix(40, 6, 28).cwiseAbs();
  const std::string path =
      (std::filesystem::temp_directory_path() / "hsdr_model.hsm1").string();
  for (Method method : {Method::pca, Method::vsrp, Method::nmf, Method::dbn}) {
    FitConfig cfg = make_cfg(2, 13);
    if (method == Method::nmf) cfg.max_iter = 20;
    if (method == Method::dbn) {
      cfg.max_iter = 3;
      cfg.dbn_pretrain_epochs = 1;
    }
    const FittedReducer m = fit(method, x, cfg);
    save_reducer(m, path);
    const FittedReducer loaded = load_reducer(path);
    CHECK(loaded.method == m.method);
    CHECK(loaded.r == m.r);
    CHECK(loaded.d == m.d);
    CHECK(loaded.centers_data == m.centers_data);
    if (m.linear_w.size() > 0)
      CHECK((loaded.linear_w - m.linear_w).cwiseAbs().maxCoeff() <=
            1e-6 * std::max(1.0, m.linear_w.cwiseAbs().maxCoeff()));
    if (m.nmf_basis.size() > 0)
      CHECK((loaded.nmf_basis - m.nmf_basis).cwiseAbs().maxCoeff() <= 1e-6);
    if (m.dbn.w0.size() > 0)
      CHECK((loaded.dbn.w0 - m.dbn.w0).cwiseAbs().maxCoeff() <=
            1e-6 * std::max(1.0, m.dbn.w0.cwiseAbs().maxCoeff()));
  }
  std::filesystem::remove(path);
}

TEST_CASE("reducer container rejects malformed files") {
  const std::string path =
      (std::filesystem::temp_directory_path() / "hsdr_bad.hsm1").string();
  {
    std::ofstream out(path, std::ios::binary);
    out << "NOPE";
  }
  CHECK_THROWS_AS(load_reducer(path), FormatError);
  std::filesystem::remove(path);
}
