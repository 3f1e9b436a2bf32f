#include "texfuse/gaussian.hpp"

#include <algorithm>
#include <cmath>

#include "texfuse/errors.hpp"

namespace texfuse {

double ml_sigma(const std::vector<double>& values) {
  if (values.size() < 2) throw input_error("ml_sigma needs at least 2 values");
  double ss = 0.0;
  for (double v : values) ss += v * v;
  return std::sqrt(ss / static_cast<double>(values.size()));
}

double excess_kurtosis(const std::vector<double>& values) {
  if (values.size() < 4) throw input_error("excess_kurtosis needs at least 4 values");
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    const double d2 = d * d;
    m2 += d2;
    m4 += d2 * d2;
  }
  m2 /= n;
  m4 /= n;
  if (m2 <= 0.0) throw input_error("excess_kurtosis: degenerate variance");
  return m4 / (m2 * m2) - 3.0;
}

double kl_gaussian_zero_mean(double sigma1, double sigma2) {
  if (sigma1 <= 0.0 || sigma2 <= 0.0)
    throw input_error("kl_gaussian_zero_mean: sigmas must be positive");
  const double r = sigma1 / sigma2;
  return std::log(sigma2 / sigma1) + 0.5 * r * r - 0.5;
}

double gaussian_pdf(double x, double sigma) {
  const double z = x / sigma;
  return std::exp(-0.5 * z * z) / (sigma * std::sqrt(2.0 * M_PI));
}

double gaussian_cdf(double x, double sigma) {
  return 0.5 * std::erfc(-x / (sigma * std::sqrt(2.0)));
}

namespace {

// Densities of N(0,s1^2) and N(0,s2^2) with s1 != s2 cross at +-x*, where
// x*^2 = 2 ln(s2/s1) / (1/s1^2 - 1/s2^2). Integrating |p1 - p2| piecewise
// through the crossings gives the exact L1 (total variation x2) distance.
double l1_exact(double s1, double s2) {
  if (s1 == s2) return 0.0;
  if (s1 > s2) std::swap(s1, s2);  // now s1 < s2: p1 wins inside, p2 outside
  const double num = 2.0 * std::log(s2 / s1);
  const double den = 1.0 / (s1 * s1) - 1.0 / (s2 * s2);
  const double xc = std::sqrt(num / den);
  // int_{-xc}^{xc} (p1 - p2) + 2 * int_{xc}^{inf} (p2 - p1)
  const double in1 = 2.0 * gaussian_cdf(xc, s1) - 1.0;
  const double in2 = 2.0 * gaussian_cdf(xc, s2) - 1.0;
  return 2.0 * (in1 - in2);
}

}  // namespace

double pdf_distance_zero_mean(double sigma1, double sigma2, PdfMetric metric) {
  if (sigma1 <= 0.0 || sigma2 <= 0.0)
    throw input_error("pdf_distance_zero_mean: sigmas must be positive");
  if (metric == PdfMetric::L1) return l1_exact(sigma1, sigma2);

  const double half = 8.0 * std::max(sigma1, sigma2);
  const int n = (1 << 16) + 1;
  const double dx = 2.0 * half / (n - 1);
  if (metric == PdfMetric::Linf) {
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = -half + i * dx;
      best = std::max(best, std::abs(gaussian_pdf(x, sigma1) - gaussian_pdf(x, sigma2)));
    }
    return best;
  }
  // L2: trapezoid over the squared difference.
  double acc = 0.0;
  double prev = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = -half + i * dx;
    const double d = gaussian_pdf(x, sigma1) - gaussian_pdf(x, sigma2);
    const double sq = d * d;
    if (i > 0) acc += 0.5 * (prev + sq) * dx;
    prev = sq;
  }
  return std::sqrt(acc);
}

}  // namespace texfuse
