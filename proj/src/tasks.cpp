#include "hsdr/tasks.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace hsdr {

Vector sam_map(const Matrix& components, const Vector& target) {
  if (target.size() != components.cols())
    throw InvalidInput("sam_map: target length mismatch");
  const Scalar target_norm = target.norm();
  if (target_norm == 0.0) throw InvalidTarget("sam_map: zero-norm target");

  Vector scores(components.rows());
  for (Index i = 0; i < components.rows(); ++i) {
    const Scalar pixel_norm = components.row(i).norm();
    scores(i) = pixel_norm == 0.0
                    ? 0.0
                    : components.row(i).dot(target) /
                          (pixel_norm * target_norm);
  }
  return scores;
}

Vector ace_scores(const Matrix& x, const Vector& target, const Matrix& cov) {
  if (target.size() != x.cols() || cov.rows() != x.cols() || cov.cols() != x.cols())
    throw InvalidInput("ace_scores: dimension mismatch");
  if (target.norm() == 0.0) throw InvalidTarget("ace_scores: zero-norm target");

  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success)
    throw NumericalFailure("ace_scores: covariance is not positive definite");

  const Vector ct = llt.solve(target);
  const Scalar t_quad = target.dot(ct);
  const Matrix cx = llt.solve(x.transpose());  // r x N
  Vector scores(x.rows());
  for (Index i = 0; i < x.rows(); ++i) {
    const Scalar x_quad = x.row(i).dot(cx.col(i));
    const Scalar denom = std::sqrt(std::max<Scalar>(x_quad * t_quad, 0.0));
    scores(i) = denom == 0.0 ? 0.0 : x.row(i).dot(ct) / denom;
  }
  return scores;
}

Vector ace_map(const Matrix& components, const Vector& target) {
  if (components.rows() < 2) throw InvalidInput("ace_map: need at least two pixels");
  const Index r = components.cols();
  const Vector mean = components.colwise().mean().transpose();
  const Matrix centered = components.rowwise() - mean.transpose();
  Matrix cov = (centered.transpose() * centered) / static_cast<Scalar>(components.rows());
  cov.diagonal().array() += 1e-8 * cov.trace() / static_cast<Scalar>(r);
  return ace_scores(components, target, cov);
}

DetectionResult sweep_threshold(const Vector& scores, const TargetMask& truth) {
  const Index n = scores.size();
  if (truth.indices.empty())
    throw InvalidInput("sweep_threshold: empty target mask");
  if (static_cast<Index>(truth.indices.size()) >= n)
    throw InvalidInput("sweep_threshold: mask covers every pixel");
  for (Index idx : truth.indices)
    if (idx < 0 || idx >= n)
      throw InvalidInput("sweep_threshold: mask index out of range");
  if (scores.maxCoeff() == scores.minCoeff())
    throw DegenerateScores("sweep_threshold: constant score vector");

  std::vector<char> is_target(static_cast<std::size_t>(n), 0);
  for (Index idx : truth.indices) is_target[static_cast<std::size_t>(idx)] = 1;
  const double positives = static_cast<double>(truth.indices.size());

  // Sort descending; walking the list moves the threshold below one more
  // distinct score at a time (detection rule: score > threshold).
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(),
            [&](Index a, Index b) { return scores(a) > scores(b); });

  DetectionResult best;
  best.f1 = -1.0;
  double tp = 0.0, fp = 0.0;
  Index at = 0;
  while (at < n) {
    const Scalar value = scores(order[static_cast<std::size_t>(at)]);
    while (at < n && scores(order[static_cast<std::size_t>(at)]) == value) {
      if (is_target[static_cast<std::size_t>(order[static_cast<std::size_t>(at)])])
        tp += 1.0;
      else
        fp += 1.0;
      ++at;
    }
    const Scalar threshold =
        at < n ? (value + scores(order[static_cast<std::size_t>(at)])) / 2.0
               : value - 1.0;  // all-positive
    const double fn = positives - tp;
    const double f1 = 2.0 * tp / std::max(2.0 * tp + fp + fn, 1e-300);
    if (f1 > best.f1 ||
        (f1 == best.f1 && threshold > best.threshold)) {
      best.f1 = f1;
      best.threshold = threshold;
      best.iou = tp / std::max(tp + fp + fn, 1e-300);
      best.precision = tp / std::max(tp + fp, 1e-300);
      best.recall = tp / std::max(tp + fn, 1e-300);
    }
  }
  best.score_map = scores;
  return best;
}

double svm_objective(const Matrix& z, const std::vector<int>& labels,
                     int positive_class, const Vector& w, double b,
                     double lambda) {
  double hinge = 0.0;
  for (Index i = 0; i < z.rows(); ++i) {
    const double y = labels[static_cast<std::size_t>(i)] == positive_class ? 1.0 : -1.0;
    hinge += std::max(0.0, 1.0 - y * (z.row(i).dot(w) - b));
  }
  return 0.5 * lambda * w.squaredNorm() + hinge / static_cast<double>(z.rows());
}

SvmModel svm_train_ovr(const Matrix& z, const std::vector<int>& labels,
                       int class_count, const SvmConfig& cfg) {
  const Index n = z.rows();
  if (static_cast<Index>(labels.size()) != n)
    throw InvalidInput("svm_train_ovr: label length mismatch");
  if (class_count < 2) throw InvalidInput("svm_train_ovr: need at least two classes");

  std::vector<Index> support(static_cast<std::size_t>(class_count), 0);
  for (int lbl : labels) {
    if (lbl < 0 || lbl >= class_count)
      throw InvalidInput("svm_train_ovr: label outside [0, class_count)");
    ++support[static_cast<std::size_t>(lbl)];
  }
  for (int c = 0; c < class_count; ++c)
    if (support[static_cast<std::size_t>(c)] == 0)
      throw MissingClass("svm_train_ovr: class " + std::to_string(c) +
                         " absent from the training sample");

  SvmModel model;
  model.cfg = cfg;
  model.class_count = class_count;
  model.weights = Matrix::Zero(class_count, z.cols());
  model.offsets = Vector::Zero(class_count);

  std::vector<Index> order(static_cast<std::size_t>(n));
  for (int c = 0; c < class_count; ++c) {
    Vector w = Vector::Zero(z.cols());
    double b = 0.0;
    std::mt19937_64 rng(detail::mix_seed(cfg.seed, 0x57b0 + static_cast<std::uint64_t>(c)));
    std::uint64_t t = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
      for (Index i = n - 1; i > 0; --i) {
        const Index j = static_cast<Index>(rng() % static_cast<std::uint64_t>(i + 1));
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
      }
      for (Index pos = 0; pos < n; ++pos) {
        const Index i = order[static_cast<std::size_t>(pos)];
        const double eta = 1.0 / (cfg.lambda * static_cast<double>(++t));
        const double y = labels[static_cast<std::size_t>(i)] == c ? 1.0 : -1.0;
        const double margin = y * (z.row(i).dot(w) - b);
        w *= (1.0 - eta * cfg.lambda);
        if (margin < 1.0) {
          w += eta * y * z.row(i).transpose();
          b -= eta * y;
        }
      }
    }
    model.weights.row(c) = w.transpose();
    model.offsets(c) = b;
  }
  return model;
}

std::vector<int> svm_predict(const SvmModel& m, const Matrix& z) {
  if (z.cols() != m.weights.cols())
    throw InvalidInput("svm_predict: dimension mismatch");
  const Matrix scores =
      (z * m.weights.transpose()).rowwise() - m.offsets.transpose();
  std::vector<int> out(static_cast<std::size_t>(z.rows()));
  for (Index i = 0; i < z.rows(); ++i) {
    Index best = 0;
    scores.row(i).maxCoeff(&best);  // lowest index wins ties
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

AccuracyReport accuracy_metrics(const std::vector<int>& predicted,
                                const std::vector<int>& truth) {
  if (predicted.size() != truth.size())
    throw InvalidInput("accuracy_metrics: length mismatch");
  if (truth.empty()) throw InvalidInput("accuracy_metrics: empty input");

  int classes = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || predicted[i] < 0)
      throw InvalidInput("accuracy_metrics: negative class id");
    classes = std::max({classes, truth[i] + 1, predicted[i] + 1});
  }

  AccuracyReport report;
  report.confusion = Eigen::MatrixXi::Zero(classes, classes);
  for (std::size_t i = 0; i < truth.size(); ++i)
    ++report.confusion(truth[i], predicted[i]);

  const Eigen::VectorXi supports = report.confusion.rowwise().sum();
  const int total_correct = report.confusion.diagonal().sum();
  report.overall = static_cast<double>(total_correct) /
                   static_cast<double>(truth.size());

  int populated = 0, common_support = -1;
  bool equal_support = true;
  for (int c = 0; c < classes; ++c) {
    if (supports(c) == 0) continue;
    ++populated;
    if (common_support < 0) common_support = supports(c);
    equal_support = equal_support && supports(c) == common_support;
  }
  if (equal_support) {
    // equal supports make the class-mean recall algebraically equal to the
    // overall accuracy; compute it identically so the equality is exact
    report.average = report.overall;
  } else {
    double acc = 0.0;
    for (int c = 0; c < classes; ++c)
      if (supports(c) > 0)
        acc += static_cast<double>(report.confusion(c, c)) /
               static_cast<double>(supports(c));
    report.average = acc / static_cast<double>(populated);
  }
  return report;
}

}  // namespace hsdr
