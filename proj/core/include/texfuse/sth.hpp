#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "texfuse/field.hpp"

namespace texfuse {

struct SthConfig {
  int quant_levels = 5;
  int dark_threshold = 3;  // mask keeps quantized levels < dark_threshold
  int connectivity = 8;    // 4 or 8
  // (x, y) in pixels; defaults to the image center.
  std::optional<std::pair<double, double>> roi_center;
};

// 256-bin empirical CDF mapping; output in (0, 1].
GrayField hist_equalize(const GrayField& field);

// Uniform bins on [0,1]: level = min(floor(value * levels), levels - 1),
// clamped below at 0. Row-major, same layout as the field.
std::vector<int> quantize(const GrayField& field, int levels);

// Alg.: equalize, quantize, threshold dark levels into a binary mask, label
// connected components, pick the component whose centroid is nearest the ROI
// center, return its pixel count. Throws input_error on an empty mask.
double sth_area(const GrayField& structure, const SthConfig& config = {});

// [sth_area / (width * height)] so the feature is size-independent.
std::vector<double> structural_feature_sth(const GrayField& structure,
                                           const SthConfig& config = {});

}  // namespace texfuse
