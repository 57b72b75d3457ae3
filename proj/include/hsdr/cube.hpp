#pragma once

#include "hsdr/core.hpp"

#include <string>
#include <vector>

namespace hsdr {

/// A hyperspectral cube. Pixels are stored as rows of an N x bands matrix in
/// line-major (along-track) order, i.e. band-interleaved-by-pixel.
struct HsiCube {
  Index lines = 0;    // along-track
  Index samples = 0;  // across-track
  Index bands = 0;
  Matrix values;      // (lines*samples) x bands

  Index pixel_count() const { return lines * samples; }
  Index pixel_index(Index line, Index sample) const { return line * samples + sample; }

  /// One encoded/raw band as a lines x samples image plane.
  Matrix band_plane(Index band) const;
};

/// HSC1 container: magic "HSC1", u16 version = 1, u32 lines/samples/bands,
/// then little-endian f32 values in BIP order.
void save_cube(const HsiCube& cube, const std::string& path);
HsiCube load_cube(const std::string& path);

/// Per-pixel class ids, 0..class_count-1.
struct LabelSet {
  std::vector<int> class_of;  // indexed by pixel
  std::vector<std::string> class_names;

  int class_count() const { return static_cast<int>(class_names.size()); }
};

void save_labels(const LabelSet& labels, const std::string& path);
LabelSet load_labels(const std::string& path);

/// Pixel indices that belong to the detection target.
struct TargetMask {
  std::vector<Index> indices;  // sorted, unique
};

void save_mask(const TargetMask& mask, const std::string& path);
TargetMask load_mask(const std::string& path);

}  // namespace hsdr
