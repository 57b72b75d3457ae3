#include "hsdr/metrics.hpp"

#include "hsdr/sampling.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

namespace hsdr {

double reconstruction_error(const Matrix& x, const Matrix& reconstructed) {
  if (x.rows() != reconstructed.rows() || x.cols() != reconstructed.cols())
    throw InvalidInput("reconstruction_error: shape mismatch");
  if (x.rows() == 0) throw InvalidInput("reconstruction_error: empty input");
  double acc = 0.0;
  for (Index i = 0; i < x.rows(); ++i) {
    const double err = (x.row(i) - reconstructed.row(i)).squaredNorm();
    acc += err / (x.row(i).squaredNorm() + 1e-12);
  }
  return acc / static_cast<double>(x.rows());
}

double reconstruction_error(const Matrix& x, const FittedReducer& m) {
  return reconstruction_error(x, decode(m, encode(m, x)));
}

namespace {

double digamma(double x) {
  double value = 0.0;
  while (x < 6.0) {
    value -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  value += std::log(x) - 0.5 * inv -
           inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
  return value;
}

std::uint64_t column_hash(const Vector& v) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  const unsigned char* bytes = reinterpret_cast<const unsigned char*>(v.data());
  const std::size_t n = static_cast<std::size_t>(v.size()) * sizeof(Scalar);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

// Jitter stream keyed by column content (not argument position), so that
// mutual_info_knn(a, b) == mutual_info_knn(b, a) bit-exactly.
Vector jittered(const Vector& v, std::uint64_t jitter_seed) {
  const Scalar mean = v.mean();
  const Scalar sd = std::sqrt((v.array() - mean).square().mean());
  std::mt19937_64 rng(column_hash(v) ^ detail::mix_seed(jitter_seed, 0x7177));
  std::uniform_real_distribution<Scalar> u(-1.0, 1.0);
  Vector out = v;
  const Scalar amp = 1e-10 * sd;
  for (Index i = 0; i < v.size(); ++i) out(i) += amp * u(rng);
  return out;
}

struct MarginalIndex {
  std::vector<Scalar> sorted;       // values ascending
  std::vector<Index> rank_of;      // original index -> rank in sorted order

  explicit MarginalIndex(const Vector& v) {
    const Index n = v.size();
    std::vector<Index> order(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(),
              [&](Index a, Index b) { return v(a) < v(b); });
    sorted.resize(static_cast<std::size_t>(n));
    rank_of.resize(static_cast<std::size_t>(n));
    for (Index r = 0; r < n; ++r) {
      sorted[static_cast<std::size_t>(r)] = v(order[static_cast<std::size_t>(r)]);
      rank_of[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = r;
    }
  }

  // points strictly inside (center - eps, center + eps), self excluded
  Index count_within(Scalar center, Scalar eps) const {
    const auto lo = std::upper_bound(sorted.begin(), sorted.end(), center - eps);
    const auto hi = std::lower_bound(sorted.begin(), sorted.end(), center + eps);
    return static_cast<Index>(hi - lo) - 1;
  }
};

}  // namespace

double mutual_info_knn(const Vector& a, const Vector& b, int k,
                       std::uint64_t jitter_seed, MiNote* note) {
  const Index n = a.size();
  if (b.size() != n) throw InvalidInput("mutual_info_knn: length mismatch");
  if (k < 1) throw InvalidInput("mutual_info_knn: k must be positive");
  if (n < 10 * static_cast<Index>(k))
    throw InvalidInput("mutual_info_knn: need at least 10*k samples");
  if (note) *note = MiNote::ok;

  if (a.maxCoeff() == a.minCoeff() || b.maxCoeff() == b.minCoeff()) {
    if (note) *note = MiNote::degenerate_column;
    return 0.0;
  }

  const Vector aj = jittered(a, jitter_seed);
  const Vector bj = jittered(b, jitter_seed);
  const MarginalIndex ax(aj);
  const MarginalIndex bx(bj);

  // Original values in a-sorted order, for the neighbour sweep.
  const Index nn = n;
  std::vector<Scalar> a_sorted = ax.sorted;
  std::vector<Scalar> b_by_a_rank(static_cast<std::size_t>(nn));
  for (Index i = 0; i < nn; ++i)
    b_by_a_rank[static_cast<std::size_t>(ax.rank_of[static_cast<std::size_t>(i)])] = bj(i);

  std::vector<Scalar> kbest(static_cast<std::size_t>(k));
  double psi_sum = 0.0;
  for (Index i = 0; i < nn; ++i) {
    const Index rank = ax.rank_of[static_cast<std::size_t>(i)];
    const Scalar av = aj(i);
    const Scalar bv = bj(i);

    // Expand outward in a-order; |da| lower-bounds the Chebyshev distance,
    // so the sweep can stop once |da| reaches the current k-th best.
    int have = 0;
    Scalar worst = std::numeric_limits<Scalar>::infinity();
    Index left = rank - 1, right = rank + 1;
    while (left >= 0 || right < nn) {
      Index pick;
      if (left >= 0 && (right >= nn ||
                        av - a_sorted[static_cast<std::size_t>(left)] <=
                            a_sorted[static_cast<std::size_t>(right)] - av)) {
        pick = left--;
      } else {
        pick = right++;
      }
      const Scalar da = std::abs(a_sorted[static_cast<std::size_t>(pick)] - av);
      // candidates arrive in ascending |da|, which lower-bounds the distance
      if (have == k && da >= worst) break;
      const Scalar dist =
          std::max(da, std::abs(b_by_a_rank[static_cast<std::size_t>(pick)] - bv));
      if (have < k) {
        kbest[static_cast<std::size_t>(have++)] = dist;
        if (have == k) {
          std::make_heap(kbest.begin(), kbest.end());
          worst = kbest.front();
        }
      } else if (dist < worst) {
        std::pop_heap(kbest.begin(), kbest.end());
        kbest.back() = dist;
        std::push_heap(kbest.begin(), kbest.end());
        worst = kbest.front();
      }
    }

    const Scalar eps = worst;
    const Index nx = ax.count_within(av, eps);
    const Index ny = bx.count_within(bv, eps);
    psi_sum += digamma(static_cast<double>(nx + 1)) +
               digamma(static_cast<double>(ny + 1));
  }

  const double mi = digamma(k) + digamma(static_cast<double>(nn)) -
                    psi_sum / static_cast<double>(nn);
  return std::max(0.0, mi);
}

MiMatrix mi_matrix(const Matrix& components, int k, Index sample_size,
                   std::uint64_t seed) {
  if (components.cols() < 2)
    throw InvalidInput("mi_matrix: need at least two components");
  if (sample_size > components.rows() || sample_size < 1)
    throw InvalidInput("mi_matrix: sample size exceeds pixel count");

  const Matrix sample = sample_rows(components, sample_size, seed);
  const Index r = components.cols();
  MiMatrix out;
  out.values = Matrix::Zero(r, r);
  out.sample_size = sample_size;
  out.knn_k = k;
  for (Index i = 0; i < r; ++i) {
    for (Index j = i + 1; j < r; ++j) {
      const double mi = mutual_info_knn(sample.col(i), sample.col(j), k, seed);
      out.values(i, j) = mi;
      out.values(j, i) = mi;
    }
  }
  return out;
}

double atpv(const Matrix& component_image) {
  const Index lines = component_image.rows();
  const Index samples = component_image.cols();
  if (lines < 2 || samples < 2)
    throw InvalidInput("atpv: image must be at least 2x2");
  if (component_image.maxCoeff() == component_image.minCoeff())
    throw DegenerateData("atpv: constant image");

  // One along-track line per across-track position = one matrix column.
  const Vector column_means = component_image.colwise().mean().transpose();
  if (column_means.maxCoeff() == column_means.minCoeff())
    return 0.0;  // no across-track structure at all

  const Scalar total_mean = component_image.mean();
  const Scalar v_total =
      (component_image.array() - total_mean).square().mean();

  Matrix leveled = component_image;
  leveled.rowwise() -= column_means.transpose();
  const Scalar leveled_mean = leveled.mean();
  const Scalar v_leveled = (leveled.array() - leveled_mean).square().mean();
  if (v_leveled == 0.0) return 1.0;

  return std::clamp(1.0 - v_leveled / v_total, 0.0, 1.0);
}

TimingRecord time_fit(Method method, const Matrix& x, const FitConfig& cfg,
                      int repeats) {
  if (repeats < 3 || repeats % 2 == 0)
    throw InvalidInput("time_fit: repeats must be odd and >= 3");
  TimingRecord record;
  record.method = method;
  record.pixel_count = x.rows();
  record.band_count = x.cols();
  for (int rep = 0; rep < repeats; ++rep) {
    const auto start = std::chrono::steady_clock::now();
    const FittedReducer model = fit(method, x, cfg);
    const auto stop = std::chrono::steady_clock::now();
    static_cast<void>(model);  // discarded; only the transform time matters
    record.run_durations.push_back(
        std::chrono::duration<double>(stop - start).count());
  }
  std::vector<double> sorted = record.run_durations;
  std::sort(sorted.begin(), sorted.end());
  record.median_seconds = sorted[sorted.size() / 2];
  return record;
}

}  // namespace hsdr
