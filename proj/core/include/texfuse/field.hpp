#pragma once

#include <cstddef>
#include <vector>

#include "texfuse/errors.hpp"

namespace texfuse {

// A single-channel 2D field, row-major. Pixel values are real; image I/O
// maps to/from [0, 1] but intermediate fields (fBm samples, texture layers)
// may take any value.
struct GrayField {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  GrayField() = default;
  GrayField(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {
    if (w <= 0 || h <= 0) throw input_error("field dimensions must be positive");
  }

  double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }

  std::size_t size() const { return data.size(); }
  bool empty() const { return data.empty(); }
};

// Tiles a field into size x size patches at the given stride, scanning
// left-to-right then top-to-bottom. Partial patches at the right/bottom
// edges are dropped.
std::vector<GrayField> extract_patches(const GrayField& field, int patch_size,
                                       int stride);

}  // namespace texfuse
