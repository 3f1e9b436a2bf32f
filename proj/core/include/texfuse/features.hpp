#pragma once

#include <optional>
#include <vector>

#include "texfuse/field.hpp"
#include "texfuse/io.hpp"
#include "texfuse/pc.hpp"
#include "texfuse/rtv.hpp"
#include "texfuse/sth.hpp"

namespace texfuse {

struct TwoViewFeatures {
  std::vector<double> phi_t;  // textural view
  std::vector<double> phi_s;  // structural view
  int label = 0;
};

enum class StructuralMode { pc, sth };

struct FeatureConfig {
  int patch_size = 32;
  int hurst_max_lag = 8;
  StructuralMode structural_mode = StructuralMode::pc;
  PcConfig pc;
  SthConfig sth;
  RtvConfig rtv;
};

// Patchwise Hurst statistics of the texture layer: tiles into non-overlapping
// patch_size x patch_size patches, estimates H per patch, returns
// [mean H, variance of H]. Patches with degenerate estimates are skipped;
// at least 2 estimable patches are required.
std::vector<double> textural_features(const GrayField& texture, int patch_size,
                                      int max_lag = 8);

// Extraction from an existing decomposition: textural features from the
// texture layer, the structural feature (mean PC or normalized STH area)
// from the structure layer. A manifest ROI, when present, sets the STH
// center; all features are otherwise whole-image.
TwoViewFeatures two_view_features_from_layers(const GrayField& structure,
                                              const GrayField& texture, int label,
                                              const FeatureConfig& config,
                                              const std::optional<RoiRect>& roi = {});

// Full per-image extraction: RTV decomposition, then the layer features.
TwoViewFeatures two_view_features(const GrayField& image, int label,
                                  const FeatureConfig& config,
                                  const std::optional<RoiRect>& roi = {});

}  // namespace texfuse
