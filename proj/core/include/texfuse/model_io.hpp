#pragma once

#include <string>

#include "texfuse/twoview.hpp"

namespace texfuse {

// JSON, format tag "texfuse-model" version 1. Weight matrices are flat
// row-major arrays next to their shape fields; SVM pairs are stored in
// (lo, hi) lexicographic order. Written atomically.
void save_model(const TwoViewModel& model, const std::string& path);
TwoViewModel load_model(const std::string& path);

}  // namespace texfuse
