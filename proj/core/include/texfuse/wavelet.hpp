#pragma once

#include <cstddef>
#include <vector>

#include "texfuse/field.hpp"

namespace texfuse {

// Haar normalization conventions. analysis2j scales the 2D step by 1/4
// (1D by 1/2) so fBm detail variances grow as 2^{2H} per level; orthonormal
// uses 1/2 (1D: 1/sqrt 2) and conserves energy.
enum class HaarNorm { analysis2j, orthonormal };

struct WaveletLevel {
  GrayField horiz;  // difference along x
  GrayField vert;   // difference along y
  GrayField diag;
  GrayField approx;
};

struct WaveletPyramid {
  HaarNorm norm = HaarNorm::analysis2j;
  std::vector<WaveletLevel> levels;  // levels[0] is the finest (level 1)
};

struct LevelStats {
  int level = 0;
  double sigma_hat = 0.0;  // zero-mean ML std of pooled detail coefficients
  std::size_t count = 0;
  double excess_kurtosis = 0.0;
};

struct SelfSimReport {
  double kl_12 = 0.0;
  double kl_12_rescaled = 0.0;  // level-2 sigma rescaled by 2^{-h_hat} first
  double l1_13 = 0.0;
  double l2_13 = 0.0;
  double linf_13 = 0.0;
  std::vector<double> variance_ratios;  // Var(level j+1)/Var(level j)
  std::vector<LevelStats> level_stats;
};

// Separable Haar analysis, recursing on the approximation plane. An odd
// trailing row/column is dropped at each level. Requires min(W,H) >= 2^levels.
WaveletPyramid haar_pyramid(const GrayField& field, int levels, HaarNorm norm);

// Pooled detail statistics (all three orientations) for each level.
std::vector<LevelStats> pyramid_level_stats(const WaveletPyramid& pyramid);

// Three-level pyramid; KL between levels 1 and 2, L1/L2/Linf between levels
// 1 and 3, adjacent variance ratios. Field must support 3 levels and must
// not be constant.
SelfSimReport self_similarity_report(const GrayField& field);

// 1D Haar detail planes, finest first, plus the final approximation.
struct Haar1D {
  HaarNorm norm = HaarNorm::analysis2j;
  std::vector<std::vector<double>> details;
  std::vector<double> approx;
};

Haar1D haar_1d(const std::vector<double>& signal, int levels, HaarNorm norm);

// Adjacent-level detail variance ratios Var(level j+1)/Var(level j) of a 1D
// Haar decomposition, finest pair first. Under analysis2j an fBm signal with
// Hurst exponent H yields ratios near 2^{2H}; white noise under orthonormal
// yields ratios near 1.
std::vector<double> level_variance_ratios(const std::vector<double>& signal,
                                          int levels, HaarNorm norm);

}  // namespace texfuse
