#include "hsdr/scene.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace hsdr {

namespace {

void validate(const SceneSpec& spec) {
  if (spec.lines < 1 || spec.samples < 1 || spec.bands < 1)
    throw InvalidSpec("scene: extents must be positive");
  if (spec.endmember_count < 1 || spec.endmember_count > spec.bands)
    throw InvalidSpec("scene: endmember_count must be in [1, bands]");
  if (spec.noise_sigma < 0 || spec.stripe_sigma < 0 || spec.smile_amplitude < 0)
    throw InvalidSpec("scene: sigmas and smile amplitude must be nonnegative");
}

// Separable Gaussian blur with a truncated kernel; edge weights renormalized.
void blur_plane(Matrix& plane, double sigma) {
  if (sigma <= 0) return;
  const int radius = static_cast<int>(std::ceil(3 * sigma));
  Vector kernel(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i)
    kernel(i + radius) = std::exp(-0.5 * (i / sigma) * (i / sigma));

  auto pass = [&](const Matrix& src) {
    Matrix dst(src.rows(), src.cols());
    for (Index r = 0; r < src.rows(); ++r) {
      for (Index c = 0; c < src.cols(); ++c) {
        Scalar acc = 0, wsum = 0;
        for (int i = -radius; i <= radius; ++i) {
          const Index cc = c + i;
          if (cc < 0 || cc >= src.cols()) continue;
          acc += kernel(i + radius) * src(r, cc);
          wsum += kernel(i + radius);
        }
        dst(r, c) = acc / wsum;
      }
    }
    return dst;
  };
  plane = pass(plane);                      // along columns
  plane = pass(plane.transpose()).transpose();  // along rows
}

}  // namespace

Matrix make_endmembers(Index count, Index bands, std::uint64_t seed) {
  std::mt19937_64 rng(detail::mix_seed(seed, 0xe17d));
  std::uniform_int_distribution<int> bump_count(3, 5);
  std::uniform_real_distribution<Scalar> center(0.0, 1.0);
  std::uniform_real_distribution<Scalar> width(0.05, 0.25);
  std::uniform_real_distribution<Scalar> height(0.2, 1.0);

  Matrix e(count, bands);
  for (Index k = 0; k < count; ++k) {
    Vector spectrum = Vector::Zero(bands);
    const int bumps = bump_count(rng);
    for (int bmp = 0; bmp < bumps; ++bmp) {
      const Scalar mu = center(rng) * static_cast<Scalar>(bands - 1);
      const Scalar sd = std::max<Scalar>(1.0, width(rng) * static_cast<Scalar>(bands));
      const Scalar h = height(rng);
      for (Index b = 0; b < bands; ++b) {
        const Scalar z = (static_cast<Scalar>(b) - mu) / sd;
        spectrum(b) += h * std::exp(-0.5 * z * z);
      }
    }
    e.row(k) = spectrum.cwiseMax(0.01).cwiseMin(1.0).transpose();
  }
  return e;
}

Matrix make_abundances(Index lines, Index samples, Index count,
                       double smoothness, std::uint64_t seed) {
  const Index n = lines * samples;
  Matrix fields(n, count);
  for (Index k = 0; k < count; ++k) {
    std::mt19937_64 rng(detail::mix_seed(seed, 0xab00 + static_cast<std::uint64_t>(k)));
    std::normal_distribution<Scalar> noise(0.0, 1.0);
    Matrix plane(lines, samples);
    for (Index l = 0; l < lines; ++l)
      for (Index s = 0; s < samples; ++s) plane(l, s) = noise(rng);
    blur_plane(plane, smoothness);

    // standardize, then sharpen so the softmax produces distinct regions
    const Scalar mean = plane.mean();
    const Scalar sd = std::sqrt((plane.array() - mean).square().mean());
    const Scalar gain = sd > 0 ? 3.0 / sd : 0.0;
    for (Index l = 0; l < lines; ++l)
      for (Index s = 0; s < samples; ++s)
        fields(l * samples + s, k) = (plane(l, s) - mean) * gain;
  }

  Matrix abundances(n, count);
  for (Index p = 0; p < n; ++p) {
    const Scalar peak = fields.row(p).maxCoeff();
    Vector ex = (fields.row(p).array() - peak).exp();
    abundances.row(p) = ex.transpose() / ex.sum();
  }
  return abundances;
}

Scene assemble_scene(const SceneSpec& spec, const Matrix& abundances,
                     const Matrix& endmembers) {
  validate(spec);
  const Index n = spec.lines * spec.samples;
  if (abundances.rows() != n || abundances.cols() != spec.endmember_count)
    throw InvalidSpec("scene: abundance matrix does not match spec");
  if (endmembers.rows() != spec.endmember_count || endmembers.cols() != spec.bands)
    throw InvalidSpec("scene: endmember matrix does not match spec");

  Scene scene;
  scene.abundances = abundances;
  scene.endmembers = endmembers;
  scene.cube.lines = spec.lines;
  scene.cube.samples = spec.samples;
  scene.cube.bands = spec.bands;
  scene.cube.values = abundances * endmembers;

  // smile: quadratic-in-sample band shift, linear interpolation, edge clamp
  if (spec.smile_amplitude > 0 && spec.samples > 1) {
    Matrix shifted(n, spec.bands);
    for (Index s = 0; s < spec.samples; ++s) {
      const Scalar u = 2.0 * static_cast<Scalar>(s) / static_cast<Scalar>(spec.samples - 1) - 1.0;
      const Scalar shift = spec.smile_amplitude * u * u;
      for (Index l = 0; l < spec.lines; ++l) {
        const Index p = scene.cube.pixel_index(l, s);
        for (Index b = 0; b < spec.bands; ++b) {
          const Scalar pos = std::min(static_cast<Scalar>(b) + shift,
                                      static_cast<Scalar>(spec.bands - 1));
          const Index b0 = static_cast<Index>(pos);
          const Index b1 = std::min(b0 + 1, spec.bands - 1);
          const Scalar frac = pos - static_cast<Scalar>(b0);
          shifted(p, b) = (1.0 - frac) * scene.cube.values(p, b0) +
                          frac * scene.cube.values(p, b1);
        }
      }
    }
    scene.cube.values = std::move(shifted);
  }

  if (spec.noise_sigma > 0) {
    std::mt19937_64 rng(detail::mix_seed(spec.seed, 0x9015e));
    std::normal_distribution<Scalar> noise(0.0, spec.noise_sigma);
    for (Index p = 0; p < n; ++p)
      for (Index b = 0; b < spec.bands; ++b) scene.cube.values(p, b) += noise(rng);
  }

  scene.stripe_gains = Vector::Ones(spec.samples);
  if (spec.stripe_sigma > 0) {
    std::mt19937_64 rng(detail::mix_seed(spec.seed, 0x57817e));
    std::normal_distribution<Scalar> gain(1.0, spec.stripe_sigma);
    for (Index s = 0; s < spec.samples; ++s) scene.stripe_gains(s) = gain(rng);
    for (Index l = 0; l < spec.lines; ++l)
      for (Index s = 0; s < spec.samples; ++s)
        scene.cube.values.row(scene.cube.pixel_index(l, s)) *= scene.stripe_gains(s);
  }

  scene.cube.values = scene.cube.values.cwiseMax(0.0).cwiseMin(kSceneSaturation);

  scene.labels.class_of.resize(static_cast<std::size_t>(n));
  for (Index p = 0; p < n; ++p) {
    Index cls = 0;
    abundances.row(p).maxCoeff(&cls);
    scene.labels.class_of[static_cast<std::size_t>(p)] = static_cast<int>(cls);
  }
  for (Index k = 0; k < spec.endmember_count; ++k)
    scene.labels.class_names.push_back("endmember_" + std::to_string(k));
  return scene;
}

Scene generate_scene(const SceneSpec& spec) {
  validate(spec);
  return assemble_scene(
      spec,
      make_abundances(spec.lines, spec.samples, spec.endmember_count,
                      spec.abundance_smoothness, spec.seed),
      make_endmembers(spec.endmember_count, spec.bands, spec.seed));
}

}  // namespace hsdr
