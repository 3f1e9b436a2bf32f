#pragma once

#include <string>
#include <vector>

namespace texfuse {

enum class SvmKernel { rbf, linear };

struct SvmConfig {
  double c = 10.0;
  // <= 0 selects the automatic value 1/(dim * variance of the normalized
  // training matrix). Gamma always applies in normalized feature space.
  double rbf_gamma = 0.0;
  double tol = 1e-3;
  SvmKernel kernel = SvmKernel::rbf;
};

// One binary subproblem of the one-vs-one ensemble. y = +1 for class_lo,
// -1 for class_hi. Support vectors are stored normalized.
struct BinarySvm {
  int class_lo = 0;
  int class_hi = 0;
  std::vector<std::vector<double>> support_vectors;
  std::vector<double> alpha_y;  // alpha_i * y_i, same order as support_vectors
  double bias = 0.0;
};

struct SvmModel {
  int k = 0;
  int dim = 0;
  SvmKernel kernel = SvmKernel::rbf;
  double c = 10.0;
  double rbf_gamma = 1.0;  // resolved value
  std::string view_tag;
  std::vector<double> norm_mean;  // z-score constants from the training split
  std::vector<double> norm_std;
  std::vector<BinarySvm> pairs;  // lexicographic (lo, hi), lo < hi
};

// Trains k(k-1)/2 binary classifiers by SMO (first-order working-set
// selection, stop when the KKT gap is <= tol). Features are z-scored with
// statistics of the training set; the constants live in the model.
// Deterministic for a fixed example order.
SvmModel svm_train(const std::vector<std::vector<double>>& features,
                   const std::vector<int>& labels, const SvmConfig& config = {},
                   const std::string& view_tag = "");

// Signed decision values f(x) = sum alpha_i y_i K(x_i, x) + b per pair, in
// (lo, hi) lexicographic order. With geometric = true, each value is divided
// by the feature-space norm of the pair's weight vector.
std::vector<double> svm_decision_distances(const SvmModel& model,
                                           const std::vector<double>& x,
                                           bool geometric = false);

// One-vs-one majority vote; ties go to the class with the largest summed
// absolute decision value over its pairs, then to the lowest class index.
int svm_predict(const SvmModel& model, const std::vector<double>& x);

// Dual objective sum(alpha) - 1/2 sum alpha_i alpha_j y_i y_j K_ij of one
// trained binary subproblem, reconstructed from the stored coefficients.
double svm_dual_objective(const SvmModel& model, const BinarySvm& pair);

}  // namespace texfuse
