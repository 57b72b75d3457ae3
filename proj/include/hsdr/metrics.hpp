#pragma once

#include "hsdr/core.hpp"
#include "hsdr/reducers.hpp"

#include <string>
#include <vector>

namespace hsdr {

/// Mean over pixels of ||x_i - xhat_i||^2 / (||x_i||^2 + 1e-12).
/// 0 for perfect reconstruction, ~1 when the reconstruction vanishes.
double reconstruction_error(const Matrix& x, const Matrix& reconstructed);
double reconstruction_error(const Matrix& x, const FittedReducer& m);

enum class MiNote { ok, degenerate_column };

/// Kraskov-type kNN mutual information estimate (estimator 1, Chebyshev
/// norm), in nats, clamped at zero. Ties are broken by a deterministic
/// jitter of amplitude 1e-10 * column std whose stream is derived from the
/// column content and `jitter_seed`, so the estimate is bit-exactly
/// symmetric in its arguments. Constant columns yield 0 with a note.
double mutual_info_knn(const Vector& a, const Vector& b, int k = 3,
                       std::uint64_t jitter_seed = 0, MiNote* note = nullptr);

struct MiMatrix {
  Matrix values;  // r x r, symmetric, zero diagonal
  Index sample_size = 0;
  int knn_k = 0;
};

/// Pairwise MI over one shared seed-fixed pixel sample.
MiMatrix mi_matrix(const Matrix& components, int k, Index sample_size,
                   std::uint64_t seed);

/// Across-track proportion of variance of a lines x samples component image:
/// 1 - V_leveled / V_total, where leveling removes the mean of each
/// along-track line (one line per across-track column).
double atpv(const Matrix& component_image);

struct TimingRecord {
  Method method;
  Index pixel_count = 0;
  Index band_count = 0;
  std::vector<double> run_durations;  // seconds, in run order
  double median_seconds = 0.0;
};

/// Wall-clock fit timing over an odd number of repeats (>= 3) on identical
/// inputs; the fitted models are discarded. Run this without concurrent
/// load — it measures the transform computation alone.
TimingRecord time_fit(Method method, const Matrix& x, const FitConfig& cfg,
                      int repeats);

}  // namespace hsdr
