#include "texfuse/features.hpp"

#include <algorithm>

#include "texfuse/fbm.hpp"

namespace texfuse {

std::vector<double> textural_features(const GrayField& texture, int patch_size,
                                      int max_lag) {
  if (patch_size < 8) throw input_error("textural_features: patch_size must be >= 8");
  const auto patches = extract_patches(texture, patch_size, patch_size);
  if (patches.size() < 2)
    throw input_error("textural_features: need at least 2 full patches");

  const int lag = std::min(max_lag, patch_size / 4);
  std::vector<double> hs;
  hs.reserve(patches.size());
  for (const auto& p : patches) {
    try {
      hs.push_back(estimate_hurst(p, lag).h_hat);
    } catch (const input_error&) {
      // constant or otherwise degenerate patch: skip
    }
  }
  if (hs.size() < 2)
    throw input_error("textural_features: fewer than 2 estimable patches");

  double mean = 0.0;
  for (double h : hs) mean += h;
  mean /= static_cast<double>(hs.size());
  double var = 0.0;
  for (double h : hs) var += (h - mean) * (h - mean);
  var /= static_cast<double>(hs.size());
  return {mean, var};
}

TwoViewFeatures two_view_features_from_layers(const GrayField& structure,
                                              const GrayField& texture, int label,
                                              const FeatureConfig& config,
                                              const std::optional<RoiRect>& roi) {
  TwoViewFeatures f;
  f.label = label;
  f.phi_t = textural_features(texture, config.patch_size, config.hurst_max_lag);
  if (config.structural_mode == StructuralMode::pc) {
    f.phi_s = structural_feature_pc(structure, config.pc);
  } else {
    SthConfig sth = config.sth;
    if (roi)
      sth.roi_center = {{roi->x + roi->w / 2.0, roi->y + roi->h / 2.0}};
    f.phi_s = structural_feature_sth(structure, sth);
  }
  return f;
}

TwoViewFeatures two_view_features(const GrayField& image, int label,
                                  const FeatureConfig& config,
                                  const std::optional<RoiRect>& roi) {
  auto [structure, texture] = rtv_decompose(image, config.rtv);
  return two_view_features_from_layers(structure, texture, label, config, roi);
}

}  // namespace texfuse
