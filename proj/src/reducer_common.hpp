#pragma once

#include "hsdr/reducers.hpp"

#include <chrono>

namespace hsdr::detail {

class FitTimer {
 public:
  FitTimer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

inline void validate_fit_input(const Matrix& x, const FitConfig& cfg, Index min_r) {
  if (x.rows() < 1 || x.cols() < 1) throw InvalidInput("fit: empty data matrix");
  if (!x.allFinite()) throw InvalidInput("fit: non-finite data");
  if (cfg.r < min_r || cfg.r > x.cols())
    throw InvalidInput("fit: r must be in [" + std::to_string(min_r) + ", d]");
}

// Largest-magnitude entry of each column made positive; fixes the sign
// ambiguity of singular vectors.
inline void fix_column_signs(Matrix& w) {
  for (Index c = 0; c < w.cols(); ++c) {
    Index at = 0;
    w.col(c).cwiseAbs().maxCoeff(&at);
    if (w(at, c) < 0) w.col(c) = -w.col(c);
  }
}

inline double effective_tol(const FitConfig& cfg, double fallback) {
  return cfg.tol > 0 ? cfg.tol : fallback;
}

inline int effective_max_iter(const FitConfig& cfg, int fallback) {
  return cfg.max_iter > 0 ? cfg.max_iter : fallback;
}

}  // namespace hsdr::detail
