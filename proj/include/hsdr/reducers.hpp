#pragma once

#include "hsdr/core.hpp"

#include <string>
#include <vector>

namespace hsdr {

enum class Method { pca, pca_cs, fastica, osp, lpp, vsrp, nmf, dbn };

const char* method_name(Method m);
Method method_from_name(const std::string& name);
bool method_centers_data(Method m);

/// Knobs shared by every fit. tol / max_iter at or below zero select the
/// per-method defaults (FastICA 1e-4/200, NMF 1e-5/500, DBN 1e-5/200).
struct FitConfig {
  Index r = 2;
  std::uint64_t seed = 0;
  double tol = 0.0;
  int max_iter = 0;

  int lpp_k = 5;
  Index lpp_subsample = 2000;  // <= 0 disables the subsampling cap
  double ica_alpha = 1.0;
  Index cs_columns = 0;        // <= 0 uses r sampled columns

  int dbn_pretrain_epochs = 10;
  double dbn_lr_pretrain = 0.05;
  double dbn_lr_finetune = 0.01;
  double dbn_momentum = 0.9;
  double dbn_l1 = 1e-4;
  int dbn_chain = 2;
  int dbn_batch = 64;
};

/// Single-hidden-layer autoencoder weights. Encode: sigmoid(x W0 + b0) on
/// min-max scaled inputs; decode: sigmoid(z W1 + b1), scaling inverted.
struct DbnWeights {
  Matrix w0;  // d x r
  Vector b0;  // r
  Matrix w1;  // r x d
  Vector b1;  // d
  Vector feature_min;  // d, from the training sample
  Vector feature_max;  // d
};

/// A trained reducer. Only the fields of the fitted method are populated.
struct FittedReducer {
  Method method = Method::pca;
  Index r = 0;
  Index d = 0;
  bool centers_data = false;
  bool not_converged = false;       // FastICA: best iterate returned
  bool clipped_negative_inputs = false;  // NMF: training data had negatives

  Matrix linear_w;  // d x r, linear methods
  Vector mean;      // d, methods that center

  Matrix nmf_basis;                        // d x r, unit-L2 columns
  double nmf_fit_residual = 0.0;           // relative Frobenius, training data
  std::vector<double> nmf_objective_history;

  DbnWeights dbn;

  double fit_seconds = 0.0;
  std::uint64_t seed = 0;
};

FittedReducer fit(Method method, const Matrix& x, const FitConfig& cfg);

FittedReducer fit_pca(const Matrix& x, const FitConfig& cfg);
FittedReducer fit_pca_cs(const Matrix& x, const FitConfig& cfg);
FittedReducer fit_fastica(const Matrix& x, const FitConfig& cfg);
FittedReducer fit_osp(const Matrix& x, const FitConfig& cfg);
FittedReducer fit_lpp(const Matrix& x, const FitConfig& cfg);
FittedReducer fit_vsrp(const Matrix& x, const FitConfig& cfg);
FittedReducer fit_nmf(const Matrix& x, const FitConfig& cfg);
FittedReducer fit_dbn(const Matrix& x, const FitConfig& cfg);

/// x: pixels x d -> codes: pixels x r.
Matrix encode(const FittedReducer& m, const Matrix& x);
/// z: pixels x r -> reconstruction: pixels x d (pseudoinverse for the linear
/// methods, basis transpose for NMF, decoder net for DBN).
Matrix decode(const FittedReducer& m, const Matrix& z);

/// Versioned binary container (HSM1), f32 payloads like the cube format.
void save_reducer(const FittedReducer& m, const std::string& path);
FittedReducer load_reducer(const std::string& path);

/// k-nearest-neighbour lists under spectral Euclidean distance, self
/// excluded; neighbours[j] holds the k nearest rows of row j.
std::vector<std::vector<Index>> knn_neighbors(const Matrix& x, int k);

/// Dense 0/1 adjacency, OR-symmetrized: g(i,j) = 1 iff i is among the k
/// nearest neighbours of j or vice versa.
Matrix knn_adjacency(const Matrix& x, int k);

namespace detail {

struct DbnGradient {
  Matrix w0;
  Vector b0;
  Matrix w1;
  Vector b1;
};

/// Full-batch autoencoder loss (mean squared error over all entries, plus
/// the L1 weight penalty) and its analytic gradient, on scaled inputs.
double dbn_loss_and_grad(const Matrix& s, const DbnWeights& w, double l1,
                         DbnGradient* grad);

}  // namespace detail

}  // namespace hsdr
