#include "texfuse/fbm.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>

#include "fft_utils.hpp"
#include "texfuse/rng.hpp"

namespace texfuse {

FbmParams make_fbm_params(double hurst, double sigma_h) {
  if (!(hurst > 0.0 && hurst < 1.0))
    throw input_error("hurst must lie in (0,1)");
  if (!(sigma_h > 0.0)) throw input_error("sigma_h must be positive");
  return FbmParams{hurst, sigma_h};
}

namespace {

double sigma_h_sq_formula(double h, double sigma_w) {
  return sigma_w * sigma_w * std::cos(M_PI * h) * std::tgamma(1.0 - 2.0 * h) /
         (2.0 * M_PI * h);
}

}  // namespace

double sigma_h_from_sigma_w(double hurst, double sigma_w) {
  if (!(hurst > 0.0 && hurst < 1.0))
    throw input_error("hurst must lie in (0,1)");
  if (!(sigma_w > 0.0)) throw input_error("sigma_w must be positive");
  double sq;
  if (std::abs(hurst - 0.5) < 1e-6) {
    // Removable singularity: cos(pi H) and Gamma(1-2H) have cancelling
    // zero/pole at H = 1/2. Straddle it and check agreement.
    const double lo = sigma_h_sq_formula(0.5 - 1e-6, sigma_w);
    const double hi = sigma_h_sq_formula(0.5 + 1e-6, sigma_w);
    if (std::abs(lo - hi) > 1e-4 * std::abs(lo))
      throw numeric_error("sigma_h limit evaluation disagrees at H = 1/2");
    sq = 0.5 * (lo + hi);
  } else {
    sq = sigma_h_sq_formula(hurst, sigma_w);
  }
  if (!(sq > 0.0) || !std::isfinite(sq))
    throw numeric_error("sigma_h formula produced a non-positive value");
  return std::sqrt(sq);
}

double fbm_covariance_2d(const FbmParams& params, double x0, double y0,
                         double x1, double y1) {
  const double h2 = 2.0 * params.hurst;
  const double nx = std::hypot(x0, y0);
  const double ny = std::hypot(x1, y1);
  const double nd = std::hypot(x0 - x1, y0 - y1);
  return 0.5 * params.sigma_h * params.sigma_h *
         (std::pow(nx, h2) + std::pow(ny, h2) - std::pow(nd, h2));
}

double structure_function(const FbmParams& params, double d1, double d2) {
  const double r = std::hypot(d1, d2);
  if (r == 0.0) throw input_error("structure_function: zero lag");
  return params.sigma_h * params.sigma_h * std::pow(r, 2.0 * params.hurst);
}

// ---- exact samplers ----

namespace {

// Factors C = L L^T, retrying once with diagonal jitter.
Eigen::MatrixXd cholesky_with_jitter(Eigen::MatrixXd& c) {
  Eigen::LLT<Eigen::MatrixXd> llt(c);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  const double jitter = 1e-10 * c.trace() / static_cast<double>(c.rows());
  c.diagonal().array() += jitter;
  llt.compute(c);
  if (llt.info() != Eigen::Success)
    throw numeric_error("fBm covariance factorization failed after jitter");
  return llt.matrixL();
}

}  // namespace

struct FbmExactSampler2D::Impl {
  Eigen::MatrixXd chol;  // lower factor over grid points excluding the origin
};

FbmExactSampler2D::FbmExactSampler2D(const FbmParams& params, int n)
    : n_(n), impl_(std::make_unique<Impl>()) {
  make_fbm_params(params.hurst, params.sigma_h);
  if (n < 2 || n > 96)
    throw input_error("exact 2D synthesis supports grid sides 2..96");
  const int m = n * n - 1;
  Eigen::MatrixXd c(m, m);
  for (int p = 0; p < m; ++p) {
    const int x0 = (p + 1) % n, y0 = (p + 1) / n;
    for (int q = 0; q <= p; ++q) {
      const int x1 = (q + 1) % n, y1 = (q + 1) / n;
      const double v = fbm_covariance_2d(params, x0, y0, x1, y1);
      c(p, q) = v;
      c(q, p) = v;
    }
  }
  impl_->chol = cholesky_with_jitter(c);
}

FbmExactSampler2D::~FbmExactSampler2D() = default;
FbmExactSampler2D::FbmExactSampler2D(FbmExactSampler2D&&) noexcept = default;
FbmExactSampler2D& FbmExactSampler2D::operator=(FbmExactSampler2D&&) noexcept = default;

GrayField FbmExactSampler2D::sample(std::uint64_t seed) const {
  const int m = n_ * n_ - 1;
  Rng rng(seed);
  Eigen::VectorXd z(m);
  for (int i = 0; i < m; ++i) z(i) = rng.gaussian();
  const Eigen::VectorXd v =
      impl_->chol.triangularView<Eigen::Lower>() * z;
  GrayField f(n_, n_);
  f.data[0] = 0.0;  // origin pinned: B(0,0) = 0
  for (int i = 0; i < m; ++i) f.data[i + 1] = v(i);
  return f;
}

struct FbmExactSampler1D::Impl {
  Eigen::MatrixXd chol;
};

FbmExactSampler1D::FbmExactSampler1D(const FbmParams& params, int n)
    : n_(n), impl_(std::make_unique<Impl>()) {
  make_fbm_params(params.hurst, params.sigma_h);
  if (n < 4 || n > 8192)
    throw input_error("exact 1D synthesis supports lengths 4..8192");
  const int m = n - 1;
  const double h2 = 2.0 * params.hurst;
  const double amp = 0.5 * params.sigma_h * params.sigma_h;
  Eigen::MatrixXd c(m, m);
  for (int p = 0; p < m; ++p) {
    const double s = p + 1;
    for (int q = 0; q <= p; ++q) {
      const double t = q + 1;
      const double v = amp * (std::pow(s, h2) + std::pow(t, h2) -
                              std::pow(std::abs(s - t), h2));
      c(p, q) = v;
      c(q, p) = v;
    }
  }
  impl_->chol = cholesky_with_jitter(c);
}

FbmExactSampler1D::~FbmExactSampler1D() = default;
FbmExactSampler1D::FbmExactSampler1D(FbmExactSampler1D&&) noexcept = default;
FbmExactSampler1D& FbmExactSampler1D::operator=(FbmExactSampler1D&&) noexcept = default;

std::vector<double> FbmExactSampler1D::sample(std::uint64_t seed) const {
  const int m = n_ - 1;
  Rng rng(seed);
  Eigen::VectorXd z(m);
  for (int i = 0; i < m; ++i) z(i) = rng.gaussian();
  const Eigen::VectorXd v =
      impl_->chol.triangularView<Eigen::Lower>() * z;
  std::vector<double> out(static_cast<std::size_t>(n_), 0.0);
  for (int i = 0; i < m; ++i) out[i + 1] = v(i);
  return out;
}

GrayField synth_fbm_exact(const FbmParams& params, int n, std::uint64_t seed) {
  return FbmExactSampler2D(params, n).sample(seed);
}

std::vector<double> synth_fbm_exact_1d(const FbmParams& params, int n,
                                       std::uint64_t seed) {
  return FbmExactSampler1D(params, n).sample(seed);
}

// ---- spectral (fractional Brownian sheet) synthesis ----

GrayField synth_fbm_spectral(const FbmParams& params, int n, std::uint64_t seed) {
  make_fbm_params(params.hurst, params.sigma_h);
  if (n < 4 || (n & (n - 1)) != 0)
    throw input_error("spectral synthesis needs a power-of-two grid side >= 4");

  // fGn autocovariance gamma(k) for unit-variance increments, circulantly
  // embedded: c = [gamma(0..n), gamma(n-1..1)], length m = 2n.
  const double h2 = 2.0 * params.hurst;
  const int m = 2 * n;
  auto gamma = [h2](double k) {
    return 0.5 * (std::pow(k + 1.0, h2) - 2.0 * std::pow(k, h2) +
                  std::pow(std::abs(k - 1.0), h2));
  };
  std::vector<std::complex<double>> c(static_cast<std::size_t>(m));
  for (int k = 0; k <= n; ++k) c[k] = gamma(k);
  for (int k = 1; k < n; ++k) c[m - k] = c[k];
  detail::fft_1d(c, -1);

  std::vector<double> sq(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) sq[k] = std::sqrt(std::max(0.0, c[k].real()));

  Rng rng(seed);
  std::vector<std::complex<double>> w(static_cast<std::size_t>(m) * m);
  for (auto& v : w) v = rng.gaussian();
  detail::fft_2d(w, m, m, -1);
  for (int y = 0; y < m; ++y)
    for (int x = 0; x < m; ++x) w[static_cast<std::size_t>(y) * m + x] *= sq[y] * sq[x];
  detail::fft_2d(w, m, m, +1);
  const double inv = 1.0 / (static_cast<double>(m) * m);

  // Top-left n x n block is a stationary increment sheet; double cumulative
  // sum turns it into the (anisotropy-tolerant) Brownian sheet sample.
  GrayField f(n, n);
  for (int y = 0; y < n; ++y) {
    double row_acc = 0.0;
    for (int x = 0; x < n; ++x) {
      row_acc += w[static_cast<std::size_t>(y) * m + x].real() * inv;
      const double above = y > 0 ? f.at(x, y - 1) : 0.0;
      f.at(x, y) = above + params.sigma_h * row_acc;
    }
  }
  return f;
}

// ---- Hurst estimation ----

HurstEstimate estimate_hurst(const GrayField& field, int max_lag) {
  if (field.width < 8 || field.height < 8)
    throw input_error("estimate_hurst: field must be at least 8x8");
  if (max_lag < 1 || max_lag > std::min(field.width, field.height) / 4)
    throw input_error("estimate_hurst: max_lag must lie in 1..min(W,H)/4");

  std::vector<double> lags, logv;
  bool any_positive = false;
  for (int r = 1; r <= max_lag; ++r) {
    double acc = 0.0;
    std::size_t count = 0;
    for (int y = 0; y < field.height; ++y)
      for (int x = 0; x + r < field.width; ++x) {
        const double d = field.at(x + r, y) - field.at(x, y);
        acc += d * d;
        ++count;
      }
    for (int y = 0; y + r < field.height; ++y)
      for (int x = 0; x < field.width; ++x) {
        const double d = field.at(x, y + r) - field.at(x, y);
        acc += d * d;
        ++count;
      }
    const double v = acc / static_cast<double>(count);
    if (v > 0.0) {
      any_positive = true;
      lags.push_back(r);
      logv.push_back(std::log(v));
    }
  }
  if (!any_positive)
    throw input_error("estimate_hurst: constant field (no increment energy)");
  if (lags.size() < 3)
    throw input_error("estimate_hurst: fewer than 3 usable lags");

  const std::size_t k = lags.size();
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    sx += std::log(lags[i]);
    sy += logv[i];
  }
  const double mx = sx / k, my = sy / k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double dx = std::log(lags[i]) - mx;
    const double dy = logv[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  HurstEstimate est;
  est.slope = sxy / sxx;
  est.intercept = my - est.slope * mx;
  est.lags_used = lags;
  if (syy > 0.0) {
    double ss_res = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const double pred = est.intercept + est.slope * std::log(lags[i]);
      ss_res += (logv[i] - pred) * (logv[i] - pred);
    }
    est.r_squared = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
  } else {
    est.r_squared = 1.0;  // all moments equal: the flat fit is exact
  }
  est.h_hat = est.slope / 2.0;
  if (est.h_hat < 0.01) {
    est.h_hat = 0.01;
    est.clamped = true;
  } else if (est.h_hat > 0.99) {
    est.h_hat = 0.99;
    est.clamped = true;
  }
  return est;
}

}  // namespace texfuse
