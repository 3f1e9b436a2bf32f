#include "texfuse/fusion.hpp"

#include <algorithm>
#include <cmath>

#include "texfuse/errors.hpp"
#include "texfuse/rng.hpp"

namespace texfuse {

namespace {

constexpr int kH1 = kFusionHidden1;
constexpr int kH2 = kFusionHidden2;

// z = W x + b, W row-major [rows][cols].
void affine(const std::vector<double>& w, const std::vector<double>& b, int rows,
            int cols, const double* x, double* z) {
  for (int r = 0; r < rows; ++r) {
    double acc = b[r];
    const double* row = w.data() + static_cast<std::size_t>(r) * cols;
    for (int c = 0; c < cols; ++c) acc += row[c] * x[c];
    z[r] = acc;
  }
}

void softmax_inplace(std::vector<double>& z) {
  const double zmax = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - zmax);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

void check_net(const FusionNet& net) {
  if (net.k < 2 || net.input_dim != net.k * (net.k - 1))
    throw input_error("fusion: inconsistent net shape");
  const std::size_t sizes[] = {static_cast<std::size_t>(kH1) * net.input_dim,
                               static_cast<std::size_t>(kH1),
                               static_cast<std::size_t>(kH2) * kH1,
                               static_cast<std::size_t>(kH2),
                               static_cast<std::size_t>(net.k) * kH2,
                               static_cast<std::size_t>(net.k)};
  const std::vector<double>* params[] = {&net.w1, &net.b1, &net.w2,
                                         &net.b2, &net.w3, &net.b3};
  for (int i = 0; i < 6; ++i) {
    if (params[i]->size() != sizes[i])
      throw input_error("fusion: parameter size mismatch");
    for (double v : *params[i])
      if (!std::isfinite(v)) throw input_error("fusion: non-finite parameter");
  }
}

}  // namespace

FusionNet fusion_init(int k, std::uint64_t seed) {
  if (k < 2) throw input_error("fusion_init: k must be >= 2");
  FusionNet net;
  net.k = k;
  net.input_dim = k * (k - 1);
  Rng rng(seed);
  auto he_fill = [&rng](std::vector<double>& w, std::size_t count, int fan_in) {
    const double scale = std::sqrt(2.0 / fan_in);
    w.resize(count);
    for (double& v : w) v = scale * rng.gaussian();
  };
  he_fill(net.w1, static_cast<std::size_t>(kH1) * net.input_dim, net.input_dim);
  he_fill(net.w2, static_cast<std::size_t>(kH2) * kH1, kH1);
  he_fill(net.w3, static_cast<std::size_t>(k) * kH2, kH2);
  net.b1.assign(kH1, 0.1);
  net.b2.assign(kH2, 0.1);
  net.b3.assign(k, 0.0);
  return net;
}

std::vector<double> fusion_forward(const FusionNet& net,
                                   const std::vector<double>& d) {
  check_net(net);
  if (static_cast<int>(d.size()) != net.input_dim)
    throw input_error("fusion_forward: input length mismatch");
  std::vector<double> z1(kH1), z2(kH2), z3(net.k);
  affine(net.w1, net.b1, kH1, net.input_dim, d.data(), z1.data());
  for (double& v : z1) v = std::max(v, 0.0);
  affine(net.w2, net.b2, kH2, kH1, z1.data(), z2.data());
  for (double& v : z2) v = std::max(v, 0.0);
  affine(net.w3, net.b3, net.k, kH2, z2.data(), z3.data());
  for (double v : z3)
    if (!std::isfinite(v)) throw numeric_error("fusion_forward: non-finite activation");
  softmax_inplace(z3);
  return z3;
}

int fusion_predict(const FusionNet& net, const std::vector<double>& d) {
  const auto p = fusion_forward(net, d);
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

FusionGradient fusion_loss_gradient(const FusionNet& net,
                                    const std::vector<std::vector<double>>& inputs,
                                    const std::vector<int>& labels) {
  check_net(net);
  if (inputs.empty() || inputs.size() != labels.size())
    throw input_error("fusion: inputs and labels must be nonempty and aligned");

  FusionGradient out;
  out.grad.k = net.k;
  out.grad.input_dim = net.input_dim;
  out.grad.w1.assign(net.w1.size(), 0.0);
  out.grad.b1.assign(net.b1.size(), 0.0);
  out.grad.w2.assign(net.w2.size(), 0.0);
  out.grad.b2.assign(net.b2.size(), 0.0);
  out.grad.w3.assign(net.w3.size(), 0.0);
  out.grad.b3.assign(net.b3.size(), 0.0);

  const double inv_n = 1.0 / static_cast<double>(inputs.size());
  std::vector<double> z1(kH1), a1(kH1), z2(kH2), a2(kH2), p(net.k);
  std::vector<double> g3(net.k), g2(kH2), g1(kH1);

  for (std::size_t ex = 0; ex < inputs.size(); ++ex) {
    const auto& x = inputs[ex];
    if (static_cast<int>(x.size()) != net.input_dim)
      throw input_error("fusion: input length mismatch");
    const int label = labels[ex];
    if (label < 0 || label >= net.k) throw input_error("fusion: label out of range");

    affine(net.w1, net.b1, kH1, net.input_dim, x.data(), z1.data());
    for (int i = 0; i < kH1; ++i) a1[i] = std::max(z1[i], 0.0);
    affine(net.w2, net.b2, kH2, kH1, a1.data(), z2.data());
    for (int i = 0; i < kH2; ++i) a2[i] = std::max(z2[i], 0.0);
    affine(net.w3, net.b3, net.k, kH2, a2.data(), p.data());
    softmax_inplace(p);
    out.loss -= std::log(std::max(p[label], 1e-300)) * inv_n;

    for (int i = 0; i < net.k; ++i)
      g3[i] = (p[i] - (i == label ? 1.0 : 0.0)) * inv_n;
    for (int i = 0; i < net.k; ++i) {
      out.grad.b3[i] += g3[i];
      for (int j = 0; j < kH2; ++j)
        out.grad.w3[static_cast<std::size_t>(i) * kH2 + j] += g3[i] * a2[j];
    }
    for (int j = 0; j < kH2; ++j) {
      double acc = 0.0;
      for (int i = 0; i < net.k; ++i)
        acc += net.w3[static_cast<std::size_t>(i) * kH2 + j] * g3[i];
      g2[j] = z2[j] > 0.0 ? acc : 0.0;
    }
    for (int i = 0; i < kH2; ++i) {
      out.grad.b2[i] += g2[i];
      for (int j = 0; j < kH1; ++j)
        out.grad.w2[static_cast<std::size_t>(i) * kH1 + j] += g2[i] * a1[j];
    }
    for (int j = 0; j < kH1; ++j) {
      double acc = 0.0;
      for (int i = 0; i < kH2; ++i)
        acc += net.w2[static_cast<std::size_t>(i) * kH1 + j] * g2[i];
      g1[j] = z1[j] > 0.0 ? acc : 0.0;
    }
    for (int i = 0; i < kH1; ++i) {
      out.grad.b1[i] += g1[i];
      for (int j = 0; j < net.input_dim; ++j)
        out.grad.w1[static_cast<std::size_t>(i) * net.input_dim + j] += g1[i] * x[j];
    }
  }
  if (!std::isfinite(out.loss))
    throw numeric_error("fusion: non-finite training loss");
  return out;
}

FusionTrainResult fusion_train(const FusionNet& init,
                               const std::vector<std::vector<double>>& inputs,
                               const std::vector<int>& labels, int epochs,
                               double lr) {
  if (epochs < 0) throw input_error("fusion_train: epochs must be >= 0");
  if (!(lr > 0.0)) throw input_error("fusion_train: lr must be positive");
  check_net(init);

  FusionTrainResult res;
  res.net = init;
  res.loss_curve.reserve(static_cast<std::size_t>(epochs));
  auto axpy = [lr](std::vector<double>& param, const std::vector<double>& g) {
    for (std::size_t i = 0; i < param.size(); ++i) param[i] -= lr * g[i];
  };
  for (int ep = 0; ep < epochs; ++ep) {
    const FusionGradient fg = fusion_loss_gradient(res.net, inputs, labels);
    res.loss_curve.push_back(fg.loss);
    axpy(res.net.w1, fg.grad.w1);
    axpy(res.net.b1, fg.grad.b1);
    axpy(res.net.w2, fg.grad.w2);
    axpy(res.net.b2, fg.grad.b2);
    axpy(res.net.w3, fg.grad.w3);
    axpy(res.net.b3, fg.grad.b3);
  }
  return res;
}

}  // namespace texfuse
