#include "hsdr/reducers.hpp"

#include "hsdr/numerics.hpp"
#include "hsdr/sampling.hpp"

#include "binary_io.hpp"
#include "reducer_common.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <vector>

namespace hsdr {

using detail::effective_max_iter;
using detail::effective_tol;
using detail::FitTimer;
using detail::fix_column_signs;
using detail::validate_fit_input;

const char* method_name(Method m) {
  switch (m) {
    case Method::pca: return "pca";
    case Method::pca_cs: return "pca_cs";
    case Method::fastica: return "fastica";
    case Method::osp: return "osp";
    case Method::lpp: return "lpp";
    case Method::vsrp: return "vsrp";
    case Method::nmf: return "nmf";
    case Method::dbn: return "dbn";
  }
  throw InvalidInput("unknown method tag");
}

Method method_from_name(const std::string& name) {
  for (Method m : {Method::pca, Method::pca_cs, Method::fastica, Method::osp,
                   Method::lpp, Method::vsrp, Method::nmf, Method::dbn})
    if (name == method_name(m)) return m;
  throw ConfigError("unknown method '" + name + "'");
}

bool method_centers_data(Method m) {
  return m == Method::pca || m == Method::pca_cs || m == Method::fastica ||
         m == Method::vsrp;
}

FittedReducer fit(Method method, const Matrix& x, const FitConfig& cfg) {
  switch (method) {
    case Method::pca: return fit_pca(x, cfg);
    case Method::pca_cs: return fit_pca_cs(x, cfg);
    case Method::fastica: return fit_fastica(x, cfg);
    case Method::osp: return fit_osp(x, cfg);
    case Method::lpp: return fit_lpp(x, cfg);
    case Method::vsrp: return fit_vsrp(x, cfg);
    case Method::nmf: return fit_nmf(x, cfg);
    case Method::dbn: return fit_dbn(x, cfg);
  }
  throw InvalidInput("unknown method tag");
}

namespace {

Vector column_mean(const Matrix& x) { return x.colwise().mean().transpose(); }

Matrix centered(const Matrix& x, const Vector& mean) {
  return x.rowwise() - mean.transpose();
}

}  // namespace

FittedReducer fit_pca(const Matrix& x, const FitConfig& cfg) {
  validate_fit_input(x, cfg, 0);
  if (x.rows() < 2) throw InvalidInput("fit_pca: need at least two pixels");
  FitTimer timer;

  FittedReducer m;
  m.method = Method::pca;
  m.d = x.cols();
  m.r = cfg.r;
  m.seed = cfg.seed;
  m.centers_data = true;
  m.mean = column_mean(x);

  const Matrix xc = centered(x, m.mean);
  const Scalar scale = xc.cwiseAbs().maxCoeff();
  if (scale == 0.0) throw DegenerateData("fit_pca: all pixels identical");

  const auto dec =
      numerics::svd(xc / std::sqrt(static_cast<Scalar>(x.rows() - 1)));
  m.linear_w = dec.vt.topRows(cfg.r).transpose();
  fix_column_signs(m.linear_w);
  m.fit_seconds = timer.seconds();
  return m;
}

FittedReducer fit_pca_cs(const Matrix& x, const FitConfig& cfg) {
  validate_fit_input(x, cfg, 1);
  if (x.rows() < 2) throw InvalidInput("fit_pca_cs: need at least two pixels");
  const Index d = x.cols();
  const Index m_cols = cfg.cs_columns > 0 ? cfg.cs_columns : cfg.r;
  if (m_cols < cfg.r || m_cols > d)
    throw InvalidInput("fit_pca_cs: cs_columns must be in [r, d]");
  FitTimer timer;

  FittedReducer m;
  m.method = Method::pca_cs;
  m.d = d;
  m.r = cfg.r;
  m.seed = cfg.seed;
  m.centers_data = true;
  m.mean = column_mean(x);
  const Matrix xc = centered(x, m.mean);

  // Sampled columns of the covariance: S(:, J) = X^T X(:, J) / N.
  const std::vector<Index> bands =
      sample_indices(d, m_cols, detail::mix_seed(cfg.seed, 0xc5));
  Matrix picked(x.rows(), m_cols);
  for (Index j = 0; j < m_cols; ++j)
    picked.col(j) = xc.col(bands[static_cast<std::size_t>(j)]);
  const Matrix s_cols =
      (xc.transpose() * picked) / static_cast<Scalar>(x.rows());

  Matrix s11(m_cols, m_cols);
  for (Index i = 0; i < m_cols; ++i)
    s11.row(i) = s_cols.row(bands[static_cast<std::size_t>(i)]);
  const auto s11_dec = numerics::svd(s11);
  const Scalar smax = s11_dec.singular_values(0);
  if (smax <= 0.0 ||
      s11_dec.singular_values(m_cols - 1) <= 1e-12 * smax)
    throw NumericalFailure("fit_pca_cs: sampled block S11 is rank deficient");

  const auto dec = numerics::svd(s_cols);
  m.linear_w = dec.u.leftCols(cfg.r);
  fix_column_signs(m.linear_w);
  m.fit_seconds = timer.seconds();
  return m;
}

FittedReducer fit_osp(const Matrix& x, const FitConfig& cfg) {
  validate_fit_input(x, cfg, 0);
  const Index n = x.rows();
  const Index d = x.cols();
  if (n < cfg.r) throw InvalidInput("fit_osp: need at least r pixels");
  FitTimer timer;

  FittedReducer m;
  m.method = Method::osp;
  m.d = d;
  m.r = cfg.r;
  m.seed = cfg.seed;
  m.centers_data = false;

  // Greedy max-residual selection. The projector P = I - Omega Omega+ is
  // tracked through an orthonormal basis Q of span(Omega), so the residual
  // norms ||P x_j||^2 update in O(N d) per selected target.
  Vector residual = x.rowwise().squaredNorm();
  const Scalar initial_max = cfg.r > 0 ? residual.maxCoeff() : 0.0;
  Matrix q(d, cfg.r);
  Matrix omega(d, cfg.r);
  std::vector<Index> chosen;

  for (Index i = 0; i < cfg.r; ++i) {
    Index jmax = 0;
    for (Index j = 1; j < n; ++j)
      if (residual(j) > residual(jmax)) jmax = j;
    if (residual(jmax) <= 1e-12 * std::max<Scalar>(initial_max, 1e-300))
      throw DegenerateData("fit_osp: residuals exhausted before r targets");
    if (std::find(chosen.begin(), chosen.end(), jmax) != chosen.end())
      throw DegenerateData("fit_osp: duplicate pixel selected");
    chosen.push_back(jmax);

    const Vector t = x.row(jmax).transpose();
    Vector dir = t;
    for (int pass = 0; pass < 2; ++pass)
      dir -= q.leftCols(i) * (q.leftCols(i).transpose() * dir);
    const Scalar norm = dir.norm();
    if (norm <= 1e-12 * std::max<Scalar>(t.norm(), 1e-300))
      throw DegenerateData("fit_osp: selected pixel is linearly dependent");
    dir /= norm;
    q.col(i) = dir;
    omega.col(i) = t;

    residual -= (x * dir).cwiseAbs2();
    residual = residual.cwiseMax(0.0);
  }

  m.linear_w = omega;
  m.fit_seconds = timer.seconds();
  return m;
}

FittedReducer fit_vsrp(const Matrix& x, const FitConfig& cfg) {
  validate_fit_input(x, cfg, 0);
  FitTimer timer;

  FittedReducer m;
  m.method = Method::vsrp;
  m.d = x.cols();
  m.r = cfg.r;
  m.seed = cfg.seed;
  m.centers_data = true;
  m.mean = column_mean(x);  // the data enters only here

  const Scalar c = std::sqrt(static_cast<Scalar>(m.d));
  const Scalar root_c = std::sqrt(c);
  std::mt19937_64 rng(detail::mix_seed(cfg.seed, 0x55));
  std::uniform_real_distribution<Scalar> u01(0.0, 1.0);

  m.linear_w.resize(m.d, m.r);
  for (Index j = 0; j < m.r; ++j) {
    for (Index i = 0; i < m.d; ++i) {
      const Scalar u = u01(rng);
      m.linear_w(i, j) = u < 0.5 / c ? root_c : (u < 1.0 / c ? -root_c : 0.0);
    }
  }
  m.fit_seconds = timer.seconds();
  return m;
}

std::vector<std::vector<Index>> knn_neighbors(const Matrix& x, int k) {
  const Index n = x.rows();
  if (k < 1 || k >= n)
    throw InvalidInput("knn_neighbors: need 1 <= k < rows");

  const Vector norms = x.rowwise().squaredNorm();
  struct Entry {
    Scalar dist;
    Index idx;
  };
  std::vector<std::vector<Entry>> best(
      static_cast<std::size_t>(n));
  for (auto& b : best) b.reserve(static_cast<std::size_t>(k));

  const Index block = 512;
  Matrix dist;
  for (Index q0 = 0; q0 < n; q0 += block) {
    const Index qn = std::min(block, n - q0);
    for (Index c0 = 0; c0 < n; c0 += block) {
      const Index cn = std::min(block, n - c0);
      dist.resize(qn, cn);
      dist.noalias() = x.middleRows(q0, qn) * x.middleRows(c0, cn).transpose();
      for (Index qi = 0; qi < qn; ++qi) {
        auto& heap = best[static_cast<std::size_t>(q0 + qi)];
        Scalar worst = heap.size() == static_cast<std::size_t>(k)
                           ? heap.back().dist
                           : std::numeric_limits<Scalar>::infinity();
        for (Index ci = 0; ci < cn; ++ci) {
          if (q0 + qi == c0 + ci) continue;
          const Scalar d2 = norms(q0 + qi) + norms(c0 + ci) - 2.0 * dist(qi, ci);
          if (d2 >= worst) continue;
          const Entry e{d2, c0 + ci};
          auto pos = std::upper_bound(
              heap.begin(), heap.end(), e,
              [](const Entry& a, const Entry& b) { return a.dist < b.dist; });
          heap.insert(pos, e);
          if (heap.size() > static_cast<std::size_t>(k)) heap.pop_back();
          if (heap.size() == static_cast<std::size_t>(k)) worst = heap.back().dist;
        }
      }
    }
  }

  std::vector<std::vector<Index>> neighbors(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    auto& out = neighbors[static_cast<std::size_t>(i)];
    out.reserve(static_cast<std::size_t>(k));
    for (const Entry& e : best[static_cast<std::size_t>(i)]) out.push_back(e.idx);
  }
  return neighbors;
}

Matrix knn_adjacency(const Matrix& x, int k) {
  const auto nb = knn_neighbors(x, k);
  const Index n = x.rows();
  Matrix g = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i : nb[static_cast<std::size_t>(j)]) {
      g(i, j) = 1.0;
      g(j, i) = 1.0;
    }
  return g;
}

FittedReducer fit_lpp(const Matrix& x, const FitConfig& cfg) {
  validate_fit_input(x, cfg, 1);
  if (cfg.lpp_k < 1) throw InvalidInput("fit_lpp: k must be positive");
  FitTimer timer;

  const Index n = x.rows();
  const Index ns = cfg.lpp_subsample > 0 ? std::min(cfg.lpp_subsample, n) : n;
  if (ns < cfg.lpp_k + 1)
    throw InvalidInput("fit_lpp: subsample smaller than k + 1");
  Matrix sub;
  const Matrix& data =
      ns < n ? (sub = sample_rows(x, ns, detail::mix_seed(cfg.seed, 0x199))) : x;

  const auto nb = knn_neighbors(data, cfg.lpp_k);

  // OR-symmetrized edges, deduplicated.
  std::vector<std::uint64_t> edges;
  edges.reserve(nb.size() * static_cast<std::size_t>(cfg.lpp_k));
  for (Index j = 0; j < ns; ++j)
    for (Index i : nb[static_cast<std::size_t>(j)]) {
      const Index a = std::min(i, j), b = std::max(i, j);
      edges.push_back(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(ns) +
                      static_cast<std::uint64_t>(b));
    }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  Vector degree = Vector::Zero(ns);
  Matrix gathered = Matrix::Zero(ns, data.cols());
  for (std::uint64_t e : edges) {
    const Index a = static_cast<Index>(e / static_cast<std::uint64_t>(ns));
    const Index b = static_cast<Index>(e % static_cast<std::uint64_t>(ns));
    degree(a) += 1.0;
    degree(b) += 1.0;
    gathered.row(a) += data.row(b);
    gathered.row(b) += data.row(a);
  }

  const Matrix xgx = data.transpose() * gathered;
  const Matrix xdx =
      data.transpose() * (data.array().colwise() * degree.array()).matrix();
  Matrix a_mat = xdx - xgx;  // X^T L X
  a_mat = ((a_mat + a_mat.transpose()) * 0.5).eval();
  Matrix b_mat = ((xdx + xdx.transpose()) * 0.5).eval();

  const auto eig = numerics::gen_sym_eig(a_mat, b_mat, true);

  FittedReducer m;
  m.method = Method::lpp;
  m.d = x.cols();
  m.r = cfg.r;
  m.seed = cfg.seed;
  m.centers_data = false;
  m.linear_w = eig.eigenvectors.leftCols(cfg.r);
  m.fit_seconds = timer.seconds();
  return m;
}

Matrix encode(const FittedReducer& m, const Matrix& x) {
  if (x.cols() != m.d)
    throw InvalidInput("encode: input has " + std::to_string(x.cols()) +
                       " bands, model expects " + std::to_string(m.d));
  switch (m.method) {
    case Method::pca:
    case Method::pca_cs:
    case Method::fastica:
    case Method::osp:
    case Method::lpp:
    case Method::vsrp: {
      if (m.centers_data) return centered(x, m.mean) * m.linear_w;
      return x * m.linear_w;
    }
    case Method::nmf: {
      const Matrix clipped = x.cwiseMax(0.0);
      const Matrix gram = m.nmf_basis.transpose() * m.nmf_basis;
      const Matrix rhs = clipped * m.nmf_basis;  // row i = basis^T x_i
      Matrix codes(x.rows(), m.r);
      for (Index i = 0; i < x.rows(); ++i)
        codes.row(i) = numerics::nnls_gram(gram, rhs.row(i).transpose()).transpose();
      return codes;
    }
    case Method::dbn: {
      Matrix s = x;
      for (Index c = 0; c < m.d; ++c) {
        const Scalar span = m.dbn.feature_max(c) - m.dbn.feature_min(c);
        if (span > 0)
          s.col(c) = (s.col(c).array() - m.dbn.feature_min(c)) / span;
        else
          s.col(c).setConstant(0.5);
      }
      return (1.0 / (1.0 + (-((s * m.dbn.w0).rowwise() + m.dbn.b0.transpose()))
                               .array()
                               .exp()))
          .matrix();
    }
  }
  throw InvalidInput("encode: unknown method");
}

Matrix decode(const FittedReducer& m, const Matrix& z) {
  if (z.cols() != m.r)
    throw InvalidInput("decode: input has " + std::to_string(z.cols()) +
                       " components, model expects " + std::to_string(m.r));
  switch (m.method) {
    case Method::pca:
    case Method::pca_cs:
    case Method::fastica:
    case Method::osp:
    case Method::lpp:
    case Method::vsrp: {
      Matrix out = z * numerics::pinv(m.linear_w);
      if (out.size() == 0) out = Matrix::Zero(z.rows(), m.d);
      if (m.centers_data) out.rowwise() += m.mean.transpose();
      return out;
    }
    case Method::nmf:
      return z * m.nmf_basis.transpose();
    case Method::dbn: {
      Matrix o = (1.0 / (1.0 + (-((z * m.dbn.w1).rowwise() + m.dbn.b1.transpose()))
                                   .array()
                                   .exp()))
                     .matrix();
      for (Index c = 0; c < m.d; ++c) {
        const Scalar span = m.dbn.feature_max(c) - m.dbn.feature_min(c);
        o.col(c) = (o.col(c).array() * span + m.dbn.feature_min(c)).matrix();
      }
      return o;
    }
  }
  throw InvalidInput("decode: unknown method");
}

namespace {

constexpr char kModelMagic[4] = {'H', 'S', 'M', '1'};
constexpr std::uint16_t kModelVersion = 1;

void write_matrix(std::ostream& out, const Matrix& m) {
  detail::put_u32(out, static_cast<std::uint32_t>(m.rows()));
  detail::put_u32(out, static_cast<std::uint32_t>(m.cols()));
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      detail::put_f32(out, static_cast<float>(m(i, j)));
}

Matrix read_matrix(std::istream& in, const std::string& path) {
  std::uint32_t rows, cols;
  if (!detail::get_u32(in, rows) || !detail::get_u32(in, cols))
    throw IoError("load_reducer: truncated matrix header in " + path);
  if (static_cast<std::uint64_t>(rows) * cols > (1ULL << 31))
    throw IoError("load_reducer: unreasonable matrix size in " + path);
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) {
      float v;
      if (!detail::get_f32(in, v))
        throw IoError("load_reducer: truncated matrix payload in " + path);
      m(i, j) = static_cast<Scalar>(v);
    }
  return m;
}

void write_vector(std::ostream& out, const Vector& v) { write_matrix(out, v); }

Vector read_vector(std::istream& in, const std::string& path) {
  const Matrix m = read_matrix(in, path);
  if (m.cols() > 1) throw IoError("load_reducer: expected a vector in " + path);
  return m.col(0).eval();
}

}  // namespace

void save_reducer(const FittedReducer& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("save_reducer: cannot open " + path);
  out.write(kModelMagic, 4);
  detail::put_u16(out, kModelVersion);
  out.put(static_cast<char>(m.method));
  const unsigned char flags = (m.centers_data ? 1 : 0) |
                              (m.not_converged ? 2 : 0) |
                              (m.clipped_negative_inputs ? 4 : 0);
  out.put(static_cast<char>(flags));
  detail::put_u32(out, static_cast<std::uint32_t>(m.r));
  detail::put_u32(out, static_cast<std::uint32_t>(m.d));
  detail::put_u64(out, m.seed);
  detail::put_f64(out, m.fit_seconds);
  detail::put_f64(out, m.nmf_fit_residual);
  write_matrix(out, m.linear_w);
  write_vector(out, m.mean);
  write_matrix(out, m.nmf_basis);
  write_matrix(out, m.dbn.w0);
  write_vector(out, m.dbn.b0);
  write_matrix(out, m.dbn.w1);
  write_vector(out, m.dbn.b1);
  write_vector(out, m.dbn.feature_min);
  write_vector(out, m.dbn.feature_max);
  detail::put_u32(out, static_cast<std::uint32_t>(m.nmf_objective_history.size()));
  for (double v : m.nmf_objective_history) detail::put_f32(out, static_cast<float>(v));
  if (!out) throw IoError("save_reducer: write failed for " + path);
}

FittedReducer load_reducer(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_reducer: cannot open " + path);
  unsigned char magic[4];
  if (!detail::get_bytes(in, magic, 4) || std::memcmp(magic, kModelMagic, 4) != 0)
    throw FormatError("load_reducer: bad magic", 0);
  std::uint16_t version;
  if (!detail::get_u16(in, version) || version != kModelVersion)
    throw FormatError("load_reducer: unsupported version", 4);

  FittedReducer m;
  const int method_byte = in.get();
  const int flags = in.get();
  if (method_byte < 0 || flags < 0)
    throw FormatError("load_reducer: truncated header", 6);
  if (method_byte > static_cast<int>(Method::dbn))
    throw FormatError("load_reducer: unknown method tag", 6);
  m.method = static_cast<Method>(method_byte);
  m.centers_data = flags & 1;
  m.not_converged = flags & 2;
  m.clipped_negative_inputs = flags & 4;

  std::uint32_t r, d;
  std::uint64_t seed;
  double fit_seconds, nmf_residual;
  if (!detail::get_u32(in, r) || !detail::get_u32(in, d) ||
      !detail::get_u64(in, seed) || !detail::get_f64(in, fit_seconds) ||
      !detail::get_f64(in, nmf_residual))
    throw FormatError("load_reducer: truncated header", 8);
  m.r = static_cast<Index>(r);
  m.d = static_cast<Index>(d);
  m.seed = seed;
  m.fit_seconds = fit_seconds;
  m.nmf_fit_residual = nmf_residual;

  m.linear_w = read_matrix(in, path);
  m.mean = read_vector(in, path);
  m.nmf_basis = read_matrix(in, path);
  m.dbn.w0 = read_matrix(in, path);
  m.dbn.b0 = read_vector(in, path);
  m.dbn.w1 = read_matrix(in, path);
  m.dbn.b1 = read_vector(in, path);
  m.dbn.feature_min = read_vector(in, path);
  m.dbn.feature_max = read_vector(in, path);
  std::uint32_t history = 0;
  if (detail::get_u32(in, history)) {
    for (std::uint32_t i = 0; i < history; ++i) {
      float v;
      if (!detail::get_f32(in, v)) break;
      m.nmf_objective_history.push_back(v);
    }
  }
  return m;
}

}  // namespace hsdr
