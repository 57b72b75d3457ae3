#pragma once

#include "hsdr/core.hpp"
#include "hsdr/cube.hpp"

#include <vector>

namespace hsdr {

/// Cosine similarity of every pixel against the target spectrum; zero-norm
/// pixels score 0.
Vector sam_map(const Matrix& components, const Vector& target);

/// Adaptive cosine estimator with an explicitly supplied covariance.
Vector ace_scores(const Matrix& x, const Vector& target, const Matrix& cov);

/// ACE against the scene covariance (mean-centered estimate over all pixels
/// of `components`, ridge 1e-8 * trace/r).
Vector ace_map(const Matrix& components, const Vector& target);

struct DetectionResult {
  Vector score_map;
  double threshold = 0.0;
  double f1 = 0.0;
  double iou = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

/// Exact F1-argmax threshold sweep over every distinct-score midpoint (plus
/// the all-positive threshold); ties break toward the higher threshold.
DetectionResult sweep_threshold(const Vector& scores, const TargetMask& truth);

struct SvmConfig {
  double lambda = 1e-4;  // L2 regularization
  int epochs = 20;
  std::uint64_t seed = 0;
};

/// One-versus-rest linear SVMs; class c scores w_c^T x - b_c.
struct SvmModel {
  Matrix weights;  // class_count x r
  Vector offsets;  // class_count
  int class_count = 0;
  SvmConfig cfg;
};

/// Hinge-loss linear SVMs trained per class by seeded stochastic subgradient
/// descent with the 1/(lambda t) step schedule. Every class id in
/// [0, class_count) must occur in `labels`.
SvmModel svm_train_ovr(const Matrix& z, const std::vector<int>& labels,
                       int class_count, const SvmConfig& cfg);

std::vector<int> svm_predict(const SvmModel& m, const Matrix& z);

/// Regularized hinge objective of one class's weights; used by the training
/// guarantees and their tests.
double svm_objective(const Matrix& z, const std::vector<int>& labels,
                     int positive_class, const Vector& w, double b,
                     double lambda);

struct AccuracyReport {
  double overall = 0.0;
  double average = 0.0;  // mean per-class recall over classes with support
  Eigen::MatrixXi confusion;  // truth rows, prediction columns
};

AccuracyReport accuracy_metrics(const std::vector<int>& predicted,
                                const std::vector<int>& truth);

}  // namespace hsdr
