#include "texfuse/rtv.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace texfuse {

namespace {

void validate(const GrayField& field, const RtvConfig& cfg) {
  if (field.width < 8 || field.height < 8)
    throw input_error("rtv: field must be at least 8x8");
  if (!(cfg.lambda > 0.0)) throw input_error("rtv: lambda must be positive");
  if (!(cfg.sigma_s >= 1.0)) throw input_error("rtv: sigma_s must be >= 1");
  if (!(cfg.eps > 0.0)) throw input_error("rtv: eps must be positive");
  if (cfg.iterations < 1) throw input_error("rtv: iterations must be >= 1");
}

std::vector<double> gauss_kernel(double sigma) {
  const int r = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * r + 1);
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    k[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + r];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable Gaussian filter with replicate padding.
GrayField gauss_filter(const GrayField& in, const std::vector<double>& k) {
  const int r = static_cast<int>(k.size() / 2);
  const int w = in.width, h = in.height;
  GrayField tmp(w, h), out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i)
        acc += k[i + r] * in.at(std::clamp(x + i, 0, w - 1), y);
      tmp.at(x, y) = acc;
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i)
        acc += k[i + r] * tmp.at(x, std::clamp(y + i, 0, h - 1));
      out.at(x, y) = acc;
    }
  return out;
}

// Forward differences; the last column (resp. row) is zero.
GrayField diff_x(const GrayField& s) {
  GrayField g(s.width, s.height);
  for (int y = 0; y < s.height; ++y)
    for (int x = 0; x + 1 < s.width; ++x)
      g.at(x, y) = s.at(x + 1, y) - s.at(x, y);
  return g;
}

GrayField diff_y(const GrayField& s) {
  GrayField g(s.width, s.height);
  for (int y = 0; y + 1 < s.height; ++y)
    for (int x = 0; x < s.width; ++x)
      g.at(x, y) = s.at(x, y + 1) - s.at(x, y);
  return g;
}

GrayField abs_field(const GrayField& g) {
  GrayField a(g.width, g.height);
  for (std::size_t i = 0; i < g.size(); ++i) a.data[i] = std::abs(g.data[i]);
  return a;
}

struct Weights {
  GrayField wx;
  GrayField wy;
};

// IRLS weights: w = [G * 1/(|G*g| + eps)] / (|g| + eps), with the weight on
// the nonexistent forward difference at the far boundary zeroed.
Weights irls_weights(const GrayField& s, const std::vector<double>& k, double eps) {
  const GrayField gx = diff_x(s), gy = diff_y(s);
  GrayField lx = gauss_filter(gx, k), ly = gauss_filter(gy, k);
  for (std::size_t i = 0; i < lx.size(); ++i)
    lx.data[i] = 1.0 / (std::abs(lx.data[i]) + eps);
  for (std::size_t i = 0; i < ly.size(); ++i)
    ly.data[i] = 1.0 / (std::abs(ly.data[i]) + eps);
  GrayField ux = gauss_filter(lx, k), uy = gauss_filter(ly, k);
  Weights w{GrayField(s.width, s.height), GrayField(s.width, s.height)};
  for (std::size_t i = 0; i < w.wx.size(); ++i) {
    w.wx.data[i] = ux.data[i] / (std::abs(gx.data[i]) + eps);
    w.wy.data[i] = uy.data[i] / (std::abs(gy.data[i]) + eps);
  }
  for (int y = 0; y < s.height; ++y) w.wx.at(s.width - 1, y) = 0.0;
  for (int x = 0; x < s.width; ++x) w.wy.at(x, s.height - 1) = 0.0;
  return w;
}

// A s = s + lambda (Dx^T Wx Dx + Dy^T Wy Dy) s, matrix-free.
void apply_system(const GrayField& s, const Weights& w, double lambda,
                  GrayField& out) {
  const int width = s.width, height = s.height;
  for (std::size_t i = 0; i < s.size(); ++i) out.data[i] = s.data[i];
  for (int y = 0; y < height; ++y)
    for (int x = 0; x + 1 < width; ++x) {
      const double f = lambda * w.wx.at(x, y) * (s.at(x + 1, y) - s.at(x, y));
      out.at(x, y) -= f;
      out.at(x + 1, y) += f;
    }
  for (int y = 0; y + 1 < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double f = lambda * w.wy.at(x, y) * (s.at(x, y + 1) - s.at(x, y));
      out.at(x, y) -= f;
      out.at(x, y + 1) += f;
    }
}

// Jacobi-preconditioned CG on the SPD system above. Relative tolerance on
// the residual, iteration cap 10 n.
GrayField solve_cg(const GrayField& rhs, const GrayField& init,
                   const Weights& w, double lambda) {
  const int width = rhs.width, height = rhs.height;
  const std::size_t n = rhs.size();

  GrayField diag(width, height, 1.0);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      double d = 0.0;
      if (x + 1 < width) d += w.wx.at(x, y);
      if (x > 0) d += w.wx.at(x - 1, y);
      if (y + 1 < height) d += w.wy.at(x, y);
      if (y > 0) d += w.wy.at(x, y - 1);
      diag.at(x, y) = 1.0 + lambda * d;
    }

  GrayField x = init;
  GrayField ax(width, height), r(width, height), z(width, height), p(width, height), ap(width, height);
  apply_system(x, w, lambda, ax);
  double bnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r.data[i] = rhs.data[i] - ax.data[i];
    bnorm += rhs.data[i] * rhs.data[i];
  }
  bnorm = std::sqrt(bnorm);
  if (bnorm == 0.0) return GrayField(width, height, 0.0);

  double rz = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    z.data[i] = r.data[i] / diag.data[i];
    rz += r.data[i] * z.data[i];
  }
  p = z;

  const std::size_t cap = 10 * n;
  for (std::size_t it = 0; it < cap; ++it) {
    double rnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) rnorm += r.data[i] * r.data[i];
    if (std::sqrt(rnorm) <= 1e-6 * bnorm) return x;

    apply_system(p, w, lambda, ap);
    double pap = 0.0;
    for (std::size_t i = 0; i < n; ++i) pap += p.data[i] * ap.data[i];
    if (pap <= 0.0) throw numeric_error("rtv: CG lost positive definiteness");
    const double alpha = rz / pap;
    for (std::size_t i = 0; i < n; ++i) {
      x.data[i] += alpha * p.data[i];
      r.data[i] -= alpha * ap.data[i];
    }
    double rz_new = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      z.data[i] = r.data[i] / diag.data[i];
      rz_new += r.data[i] * z.data[i];
    }
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p.data[i] = z.data[i] + beta * p.data[i];
  }
  throw numeric_error("rtv: linear solver did not converge");
}

}  // namespace

double rtv_objective(const GrayField& field, const GrayField& structure,
                     const RtvConfig& config) {
  if (field.width != structure.width || field.height != structure.height)
    throw input_error("rtv_objective: dimension mismatch");
  validate(field, config);
  const auto k = gauss_kernel(config.sigma_s);

  double data_term = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double d = structure.data[i] - field.data[i];
    data_term += d * d;
  }

  const GrayField gx = diff_x(structure), gy = diff_y(structure);
  const GrayField dx = gauss_filter(abs_field(gx), k);
  const GrayField dy = gauss_filter(abs_field(gy), k);
  const GrayField lx = gauss_filter(gx, k), ly = gauss_filter(gy, k);
  double reg = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    reg += dx.data[i] / (std::abs(lx.data[i]) + config.eps);
    reg += dy.data[i] / (std::abs(ly.data[i]) + config.eps);
  }
  return data_term + config.lambda * reg;
}

std::pair<GrayField, GrayField> rtv_decompose(const GrayField& field,
                                              const RtvConfig& config) {
  validate(field, config);
  const auto k = gauss_kernel(config.sigma_s);

  GrayField s = field;
  double current = rtv_objective(field, s, config);
  for (int it = 0; it < config.iterations; ++it) {
    const Weights w = irls_weights(s, k, config.eps);
    const GrayField candidate = solve_cg(field, s, w, config.lambda);

    // The reweighted quadratic model can overshoot the true objective;
    // backtrack toward the previous iterate until it descends.
    double step = 1.0;
    bool accepted = false;
    for (int t = 0; t < 10; ++t) {
      GrayField trial(s.width, s.height);
      for (std::size_t i = 0; i < s.size(); ++i)
        trial.data[i] = s.data[i] + step * (candidate.data[i] - s.data[i]);
      const double value = rtv_objective(field, trial, config);
      if (value <= current + 1e-12) {
        s = std::move(trial);
        current = value;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // fixed point reached
  }

  GrayField t(field.width, field.height);
  for (std::size_t i = 0; i < field.size(); ++i)
    t.data[i] = field.data[i] - s.data[i];
  return {std::move(s), std::move(t)};
}

}  // namespace texfuse
