#pragma once

#include <cstdint>
#include <vector>

#include "texfuse/field.hpp"

namespace texfuse {

// Log-Gabor quadrature bank parameters. gamma is the noise threshold applied
// to the per-scale phase-deviation energy; the default comes from the
// calibration policy in pc_gamma_calibration (mean + 2 std of the noise-only
// response at sigma = 0.1).
struct PcConfig {
  int scales = 4;
  int orientations = 6;
  double gamma = 0.027;
  double eps = 1e-4;
  double min_wavelength = 3.0;
  double mult = 2.1;
  double sigma_onf = 0.55;
};

// Per-pixel phase congruency in [0, 1]: per orientation, quadrature responses
// across scales give amplitudes A_n and an amplitude-weighted mean phase; the
// energy sum_n max(A_n (cos dphi - |sin dphi|) - gamma, 0) is weighted by a
// frequency-spread sigmoid and pooled over orientations as a ratio of sums
// against the total amplitude. Field must be at least 16x16.
GrayField phase_congruency(const GrayField& structure, const PcConfig& config = {});

// [mean of the PC map].
std::vector<double> structural_feature_pc(const GrayField& structure,
                                          const PcConfig& config = {});

// Recomputes the gamma policy: mean + 2 std of the pointwise per-scale
// A_n zeta response of Gaussian white noise (std noise_sigma) on a
// size x size field.
double pc_gamma_calibration(int size, double noise_sigma, std::uint64_t seed,
                            const PcConfig& config = {});

}  // namespace texfuse
