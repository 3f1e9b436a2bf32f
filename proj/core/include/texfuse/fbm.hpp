#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "texfuse/field.hpp"

namespace texfuse {

// Isotropic fBm field parameters. sigma_h is the amplitude of the covariance
// (sigma_h^2/2)(|x|^{2H} + |y|^{2H} - |x-y|^{2H}).
struct FbmParams {
  double hurst = 0.5;
  double sigma_h = 1.0;
};

FbmParams make_fbm_params(double hurst, double sigma_h);

// Amplitude derived from the driving white-noise variance sigma_w^2:
// sigma_h^2 = sigma_w^2 cos(pi H) Gamma(1-2H) / (2 pi H). The H = 1/2 pole is
// removable; near it the formula is evaluated at H = 1/2 +- 1e-6 and the two
// sides are required to agree.
double sigma_h_from_sigma_w(double hurst, double sigma_w);

double fbm_covariance_2d(const FbmParams& params, double x0, double y0,
                         double x1, double y1);

// Variance of the increment at lag (d1, d2): sigma_h^2 r^{2H}, r = |(d1,d2)|.
double structure_function(const FbmParams& params, double d1, double d2);

struct HurstEstimate {
  double h_hat = 0.0;
  double slope = 0.0;  // = 2 h_hat before clamping
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> lags_used;
  bool clamped = false;
};

// Variogram regression: pooled raw second moment of horizontal and vertical
// increments at integer lags r = 1..max_lag, OLS on (log r, log v(r)),
// h_hat = slope/2 clamped to (0.01, 0.99). Requires a field of at least 8x8,
// max_lag <= min(W,H)/4, and at least 3 lags with positive moment.
HurstEstimate estimate_hurst(const GrayField& field, int max_lag = 8);

// Exact synthesis by Cholesky factorization of the grid covariance with the
// origin pinned to zero. Factorization happens once per sampler; sampling is
// a matrix-vector product per seed. If the factorization fails it is retried
// once with diagonal jitter 1e-10 trace/m, then reported as numeric_error.
class FbmExactSampler2D {
 public:
  // n is the grid side, n <= 96 (the covariance matrix is (n^2-1)^2).
  FbmExactSampler2D(const FbmParams& params, int n);
  ~FbmExactSampler2D();
  FbmExactSampler2D(FbmExactSampler2D&&) noexcept;
  FbmExactSampler2D& operator=(FbmExactSampler2D&&) noexcept;

  GrayField sample(std::uint64_t seed) const;
  int grid_side() const { return n_; }

 private:
  struct Impl;
  int n_;
  std::unique_ptr<Impl> impl_;
};

class FbmExactSampler1D {
 public:
  // n is the signal length, t = 0..n-1 with B(0) = 0; n <= 8192.
  FbmExactSampler1D(const FbmParams& params, int n);
  ~FbmExactSampler1D();
  FbmExactSampler1D(FbmExactSampler1D&&) noexcept;
  FbmExactSampler1D& operator=(FbmExactSampler1D&&) noexcept;

  std::vector<double> sample(std::uint64_t seed) const;
  int length() const { return n_; }

 private:
  struct Impl;
  int n_;
  std::unique_ptr<Impl> impl_;
};

GrayField synth_fbm_exact(const FbmParams& params, int n, std::uint64_t seed);
std::vector<double> synth_fbm_exact_1d(const FbmParams& params, int n,
                                       std::uint64_t seed);

// Approximate large-grid synthesis: per-axis circulant embedding of the fGn
// autocovariance, a separable spectral filter of white noise, then cumulative
// summation along both axes (a fractional Brownian sheet). n must be a power
// of two. Validated through Hurst-estimator recovery, not exact covariance.
GrayField synth_fbm_spectral(const FbmParams& params, int n, std::uint64_t seed);

}  // namespace texfuse
