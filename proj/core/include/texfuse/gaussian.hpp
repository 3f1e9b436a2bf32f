#pragma once

#include <vector>

namespace texfuse {

enum class PdfMetric { L1, L2, Linf };

// Zero-mean Gaussian ML scale: sqrt(mean of squares). Requires >= 2 values.
double ml_sigma(const std::vector<double>& values);

// m4/m2^2 - 3 with central moments. Requires >= 4 values and nonzero variance.
double excess_kurtosis(const std::vector<double>& values);

// KL(N(0,s1^2) || N(0,s2^2)) = log(s2/s1) + s1^2/(2 s2^2) - 1/2.
double kl_gaussian_zero_mean(double sigma1, double sigma2);

// Norm of the pointwise difference of two zero-mean Gaussian densities.
// L1 is exact (density crossing points + CDF); L2 and Linf are evaluated on
// a dense grid over [-8 max(s1,s2), 8 max(s1,s2)] with 2^16+1 points,
// trapezoid rule for L2.
double pdf_distance_zero_mean(double sigma1, double sigma2, PdfMetric metric);

double gaussian_pdf(double x, double sigma);
double gaussian_cdf(double x, double sigma);

}  // namespace texfuse
