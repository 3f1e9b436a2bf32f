#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "texfuse/field.hpp"

namespace texfuse {

struct RoiRect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
};

struct ManifestEntry {
  std::string path;
  int label = 0;  // dense, 0..k-1
  std::optional<RoiRect> roi;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  int class_count = 0;
};

// Reads an 8-bit grayscale image. Dispatches on magic bytes: "P5" for PGM,
// the PNG signature otherwise. PNG may be grayscale or RGB (color types 0/2,
// bit depth 8, no interlace); RGB collapses to the unweighted channel mean.
// Values are scaled to [0,1].
GrayField read_image(const std::string& path);

// Writes an 8-bit P5 PGM. Values are clamped to [0,1] and quantized with
// round-half-up. The write is atomic (temp file + rename).
void write_image(const GrayField& field, const std::string& path);

// Raw field dump: 16-byte header (width, height as little-endian uint64)
// followed by row-major little-endian doubles. Atomic write.
void write_field_raw(const GrayField& field, const std::string& path);
GrayField read_field_raw(const std::string& path);

// CSV manifest with a header row and columns path,label[,roi_x,roi_y,roi_w,roi_h].
// Labels are remapped densely to 0..k-1 in first-occurrence order. Duplicate
// paths and classes with fewer than 2 entries are rejected.
DatasetManifest load_manifest(const std::string& path);

// Writes text atomically: content goes to a temp file in the same directory,
// then renames over the destination.
void write_text_atomic(const std::string& path, const std::string& content);

}  // namespace texfuse
