#include "texfuse/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "texfuse/errors.hpp"

namespace texfuse {

namespace {

double kernel_eval(SvmKernel kernel, double gamma, const std::vector<double>& a,
                   const std::vector<double>& b) {
  if (kernel == SvmKernel::linear) {
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
    return dot;
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sq += d * d;
  }
  return std::exp(-gamma * sq);
}

struct BinaryResult {
  std::vector<double> alpha;
  double bias = 0.0;
};

// Two-variable SMO with LIBSVM-style first-order working-set selection.
// Minimizes f(a) = 1/2 a^T Q a - e^T a over 0 <= a <= C, y^T a = 0,
// where Q_ij = y_i y_j K_ij. Ties in selection go to the lowest index.
BinaryResult smo_solve(const std::vector<std::vector<double>>& x,
                       const std::vector<double>& y, double c, double tol,
                       SvmKernel kernel, double gamma) {
  const std::size_t n = x.size();
  std::vector<double> kmat(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = kernel_eval(kernel, gamma, x[i], x[j]);
      kmat[i * n + j] = v;
      kmat[j * n + i] = v;
    }

  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // grad of f at alpha = 0

  const std::size_t max_iter = 1000000;
  for (std::size_t iter = 0;; ++iter) {
    if (iter >= max_iter) throw numeric_error("svm: SMO iteration cap reached");

    // i maximizes -y g over I_up, j minimizes it over I_low.
    int sel_i = -1, sel_j = -1;
    double up_max = -std::numeric_limits<double>::infinity();
    double low_min = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      const bool in_up = (y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0);
      const bool in_low = (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < c);
      if (in_up && v > up_max) {
        up_max = v;
        sel_i = static_cast<int>(t);
      }
      if (in_low && v < low_min) {
        low_min = v;
        sel_j = static_cast<int>(t);
      }
    }
    if (sel_i < 0 || sel_j < 0 || up_max - low_min <= tol) break;

    const std::size_t i = static_cast<std::size_t>(sel_i);
    const std::size_t j = static_cast<std::size_t>(sel_j);

    // Feasible direction u = y_i e_i - y_j e_j preserves y^T a; the optimal
    // unclipped step along it is (up_max - low_min) / (K_ii + K_jj - 2 K_ij).
    double eta = kmat[i * n + i] + kmat[j * n + j] - 2.0 * kmat[i * n + j];
    if (eta <= 0.0) eta = 1e-12;
    double step = (up_max - low_min) / eta;

    double bound = std::numeric_limits<double>::infinity();
    bound = std::min(bound, y[i] > 0 ? c - alpha[i] : alpha[i]);
    bound = std::min(bound, y[j] > 0 ? alpha[j] : c - alpha[j]);
    step = std::min(step, bound);

    const double delta_i = y[i] * step;
    const double delta_j = -y[j] * step;
    alpha[i] += delta_i;
    alpha[j] += delta_j;
    for (std::size_t t = 0; t < n; ++t)
      grad[t] += y[t] * (y[i] * kmat[t * n + i] * delta_i +
                         y[j] * kmat[t * n + j] * delta_j);
  }

  // Bias from free vectors, else the midpoint of the KKT interval.
  BinaryResult res;
  res.alpha = alpha;
  double acc = 0.0;
  int free_count = 0;
  for (std::size_t t = 0; t < n; ++t)
    if (alpha[t] > 0.0 && alpha[t] < c) {
      acc += -y[t] * grad[t];
      ++free_count;
    }
  if (free_count > 0) {
    res.bias = acc / free_count;
  } else {
    double up_max = -std::numeric_limits<double>::infinity();
    double low_min = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      if ((y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0))
        up_max = std::max(up_max, v);
      if ((y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < c))
        low_min = std::min(low_min, v);
    }
    res.bias = 0.5 * (up_max + low_min);
  }
  return res;
}

}  // namespace

SvmModel svm_train(const std::vector<std::vector<double>>& features,
                   const std::vector<int>& labels, const SvmConfig& config,
                   const std::string& view_tag) {
  if (features.empty() || features.size() != labels.size())
    throw input_error("svm_train: features and labels must be nonempty and aligned");
  if (!(config.c > 0.0)) throw input_error("svm_train: C must be positive");
  if (!(config.tol > 0.0)) throw input_error("svm_train: tol must be positive");
  const std::size_t dim = features[0].size();
  if (dim == 0) throw input_error("svm_train: empty feature vectors");
  int k = 0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].size() != dim) throw input_error("svm_train: ragged features");
    for (double v : features[i])
      if (!std::isfinite(v)) throw input_error("svm_train: non-finite feature");
    if (labels[i] < 0) throw input_error("svm_train: negative label");
    k = std::max(k, labels[i] + 1);
  }
  std::vector<std::size_t> class_counts(k, 0);
  for (int l : labels) ++class_counts[l];
  for (int c = 0; c < k; ++c)
    if (class_counts[c] == 0)
      throw input_error("svm_train: class " + std::to_string(c) + " has no examples");
  if (k < 2) throw input_error("svm_train: need at least 2 classes");

  SvmModel model;
  model.k = k;
  model.dim = static_cast<int>(dim);
  model.kernel = config.kernel;
  model.c = config.c;
  model.view_tag = view_tag;

  model.norm_mean.assign(dim, 0.0);
  model.norm_std.assign(dim, 0.0);
  for (const auto& f : features)
    for (std::size_t d = 0; d < dim; ++d) model.norm_mean[d] += f[d];
  for (double& m : model.norm_mean) m /= static_cast<double>(features.size());
  for (const auto& f : features)
    for (std::size_t d = 0; d < dim; ++d) {
      const double dv = f[d] - model.norm_mean[d];
      model.norm_std[d] += dv * dv;
    }
  for (double& s : model.norm_std) {
    s = std::sqrt(s / static_cast<double>(features.size()));
    if (s < 1e-12) s = 1.0;
  }

  std::vector<std::vector<double>> normalized(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) {
    normalized[i].resize(dim);
    for (std::size_t d = 0; d < dim; ++d)
      normalized[i][d] = (features[i][d] - model.norm_mean[d]) / model.norm_std[d];
  }

  if (config.rbf_gamma > 0.0) {
    model.rbf_gamma = config.rbf_gamma;
  } else {
    // 1/(dim * variance of all entries of the normalized matrix)
    double mean = 0.0, var = 0.0;
    const double count = static_cast<double>(normalized.size() * dim);
    for (const auto& f : normalized)
      for (double v : f) mean += v;
    mean /= count;
    for (const auto& f : normalized)
      for (double v : f) var += (v - mean) * (v - mean);
    var /= count;
    if (var < 1e-12) var = 1.0;
    model.rbf_gamma = 1.0 / (static_cast<double>(dim) * var);
  }

  for (int lo = 0; lo < k; ++lo)
    for (int hi = lo + 1; hi < k; ++hi) {
      std::vector<std::vector<double>> x;
      std::vector<double> y;
      for (std::size_t i = 0; i < normalized.size(); ++i) {
        if (labels[i] == lo) {
          x.push_back(normalized[i]);
          y.push_back(1.0);
        } else if (labels[i] == hi) {
          x.push_back(normalized[i]);
          y.push_back(-1.0);
        }
      }
      const BinaryResult res =
          smo_solve(x, y, config.c, config.tol, model.kernel, model.rbf_gamma);
      BinarySvm pair;
      pair.class_lo = lo;
      pair.class_hi = hi;
      pair.bias = res.bias;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (res.alpha[i] > 0.0) {
          pair.support_vectors.push_back(x[i]);
          pair.alpha_y.push_back(res.alpha[i] * y[i]);
        }
      model.pairs.push_back(std::move(pair));
    }
  return model;
}

namespace {

std::vector<double> normalize_input(const SvmModel& model,
                                    const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != model.dim)
    throw input_error("svm: input dimension mismatch");
  std::vector<double> z(x.size());
  for (std::size_t d = 0; d < x.size(); ++d)
    z[d] = (x[d] - model.norm_mean[d]) / model.norm_std[d];
  return z;
}

double pair_decision(const SvmModel& model, const BinarySvm& pair,
                     const std::vector<double>& z) {
  double f = pair.bias;
  for (std::size_t i = 0; i < pair.support_vectors.size(); ++i)
    f += pair.alpha_y[i] *
         kernel_eval(model.kernel, model.rbf_gamma, pair.support_vectors[i], z);
  return f;
}

double pair_weight_norm(const SvmModel& model, const BinarySvm& pair) {
  double sq = 0.0;
  for (std::size_t i = 0; i < pair.support_vectors.size(); ++i)
    for (std::size_t j = 0; j < pair.support_vectors.size(); ++j)
      sq += pair.alpha_y[i] * pair.alpha_y[j] *
            kernel_eval(model.kernel, model.rbf_gamma, pair.support_vectors[i],
                        pair.support_vectors[j]);
  return std::sqrt(std::max(sq, 1e-24));
}

}  // namespace

std::vector<double> svm_decision_distances(const SvmModel& model,
                                           const std::vector<double>& x,
                                           bool geometric) {
  const std::vector<double> z = normalize_input(model, x);
  std::vector<double> out;
  out.reserve(model.pairs.size());
  for (const auto& pair : model.pairs) {
    double f = pair_decision(model, pair, z);
    if (geometric) f /= pair_weight_norm(model, pair);
    out.push_back(f);
  }
  return out;
}

int svm_predict(const SvmModel& model, const std::vector<double>& x) {
  const std::vector<double> decisions = svm_decision_distances(model, x);
  std::vector<int> votes(model.k, 0);
  std::vector<double> confidence(model.k, 0.0);
  for (std::size_t p = 0; p < model.pairs.size(); ++p) {
    const auto& pair = model.pairs[p];
    const double d = decisions[p];
    ++votes[d > 0.0 ? pair.class_lo : pair.class_hi];
    confidence[pair.class_lo] += std::abs(d);
    confidence[pair.class_hi] += std::abs(d);
  }
  int best = 0;
  for (int c = 1; c < model.k; ++c) {
    if (votes[c] > votes[best] ||
        (votes[c] == votes[best] && confidence[c] > confidence[best]))
      best = c;
  }
  return best;
}

double svm_dual_objective(const SvmModel& model, const BinarySvm& pair) {
  // Zero-alpha training points contribute nothing, so the stored support
  // vectors reconstruct the objective exactly.
  double sum_alpha = 0.0;
  for (double ay : pair.alpha_y) sum_alpha += std::abs(ay);
  double quad = 0.0;
  for (std::size_t i = 0; i < pair.support_vectors.size(); ++i)
    for (std::size_t j = 0; j < pair.support_vectors.size(); ++j)
      quad += pair.alpha_y[i] * pair.alpha_y[j] *
              kernel_eval(model.kernel, model.rbf_gamma, pair.support_vectors[i],
                          pair.support_vectors[j]);
  return sum_alpha - 0.5 * quad;
}

}  // namespace texfuse
