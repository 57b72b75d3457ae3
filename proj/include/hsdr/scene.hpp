#pragma once

#include "hsdr/core.hpp"
#include "hsdr/cube.hpp"

namespace hsdr {

/// Parameters of the synthetic scene generator. The clean signal is a linear
/// mixture of smooth endmember spectra with smooth abundance fields; smile,
/// additive noise and across-track striping are injected on top, in that
/// order, so dividing each across-track column by its gain recovers the
/// pre-stripe cube exactly.
struct SceneSpec {
  Index lines = 64;
  Index samples = 64;
  Index bands = 116;
  Index endmember_count = 4;
  double abundance_smoothness = 6.0;  // Gaussian field length scale, pixels
  double noise_sigma = 0.0;           // additive, reflectance units
  double stripe_sigma = 0.0;          // std-dev of per-column multiplicative gain
  double smile_amplitude = 0.0;       // band-index shift at the swath edge
  std::uint64_t seed = 0;
};

/// Values are clipped here after artifact injection; pixels touching the cap
/// count as saturated for the classification pre-filter.
constexpr Scalar kSceneSaturation = 1.5;

struct Scene {
  HsiCube cube;
  LabelSet labels;      // argmax abundance per pixel
  Matrix abundances;    // N x endmember_count, rows sum to 1
  Matrix endmembers;    // endmember_count x bands
  Vector stripe_gains;  // per across-track column (all ones when disabled)
};

/// Smooth nonnegative spectra: 3-5 Gaussian bumps per endmember over the band
/// axis, clipped to [0.01, 1].
Matrix make_endmembers(Index count, Index bands, std::uint64_t seed);

/// Softmax of per-endmember smoothed Gaussian random fields; rows sum to 1.
Matrix make_abundances(Index lines, Index samples, Index count,
                       double smoothness, std::uint64_t seed);

/// Mixing + artifact injection for externally supplied abundances/endmembers.
Scene assemble_scene(const SceneSpec& spec, const Matrix& abundances,
                     const Matrix& endmembers);

Scene generate_scene(const SceneSpec& spec);

}  // namespace hsdr
