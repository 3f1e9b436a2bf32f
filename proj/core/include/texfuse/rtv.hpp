#pragma once

#include <utility>

#include "texfuse/field.hpp"

namespace texfuse {

struct RtvConfig {
  double lambda = 0.01;   // structure-texture tradeoff
  double sigma_s = 3.0;   // Gaussian window scale, pixels
  double eps = 1e-3;      // denominator guard (both variation measures)
  int iterations = 4;     // outer reweighting iterations
};

// Relative-total-variation objective: sum (S - I)^2 plus lambda times the
// per-pixel windowed total variation over windowed inherent variation,
// per axis. Exposed so descent across solver iterations is testable.
double rtv_objective(const GrayField& field, const GrayField& structure,
                     const RtvConfig& config);

// Splits I into structure S (RTV minimizer, iteratively reweighted linear
// systems solved by Jacobi-preconditioned CG) and texture T = I - S, exact
// elementwise. Throws numeric_error if a linear solve fails to converge.
std::pair<GrayField, GrayField> rtv_decompose(const GrayField& field,
                                              const RtvConfig& config);

}  // namespace texfuse
