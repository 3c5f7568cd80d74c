#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include "critflow/field.hpp"

namespace critflow {

/// Radial envelope for random divergence-free data. Radii are in units of
/// the lattice index |m|, so the same profile means the same mode set on any
/// box length.
struct SpectrumProfile {
  enum class Shape { plateau, power_law };

  Shape shape = Shape::plateau;
  double exponent = 0.0;  // power_law only: |c_k| ∝ |m|^exponent
  double r_min = 1.0;
  double r_max = 2.0;
  double amplitude = 1.0;
  std::uint64_t seed = 0;
  /// Relative spread of per-mode magnitudes, uniform in [1-j, 1+j].
  double jitter = 0.0;

  double envelope(double r) const {
    return shape == Shape::plateau ? 1.0 : std::pow(r, exponent);
  }
};

namespace detail {

/// Platform-independent uniform double in [0, 1) from the raw 64-bit stream
/// (std distributions are implementation-defined).
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Random real, zero-mean, divergence-free field with |c_k| following the
/// profile envelope on the band r_min ≤ |m| ≤ r_max (intersected with the
/// modes kept by dealiasing). Directions and phases are random; the same
/// seed reproduces the same field bit for bit.
inline SpectralVectorField random_divfree_field(const Grid& grid, const SpectrumProfile& profile) {
  if (!(profile.amplitude >= 0.0)) throw std::invalid_argument("random_divfree_field: amplitude must be nonnegative");
  if (!(profile.jitter >= 0.0 && profile.jitter < 1.0)) {
    throw std::invalid_argument("random_divfree_field: jitter must lie in [0, 1)");
  }
  SpectralVectorField f(grid);
  std::mt19937_64 rng(profile.seed);
  std::size_t populated = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid.is_nyquist(i) || !grid.is_retained(i)) continue;
    const double r = std::sqrt(static_cast<double>(grid.shell(i)));
    if (r < profile.r_min || r > profile.r_max) continue;
    const std::size_t j = grid.mirror(i);
    if (j < i) continue;  // filled from its partner
    ++populated;
    const auto k = grid.wavevector(i);
    Vec3c v{};
    double norm = 0.0;
    do {
      for (auto& c : v) {
        const double re = 2.0 * detail::unit_uniform(rng) - 1.0;
        const double im = 2.0 * detail::unit_uniform(rng) - 1.0;
        c = Complex(re, im);
      }
      const Complex s = (k[0] * v[0] + k[1] * v[1] + k[2] * v[2]) / grid.k2(i);
      for (std::size_t a = 0; a < 3; ++a) v[a] -= s * k[a];
      norm = std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2]));
    } while (norm < 1e-3);
    const double spread = 1.0 + profile.jitter * (2.0 * detail::unit_uniform(rng) - 1.0);
    const double target = profile.amplitude * profile.envelope(r) * spread;
    for (auto& c : v) c *= target / norm;
    f.set(i, v);
    f.set(j, Vec3c{std::conj(v[0]), std::conj(v[1]), std::conj(v[2])});
  }
  if (populated == 0) {
    throw std::invalid_argument("random_divfree_field: band [" + std::to_string(profile.r_min) + ", " +
                                std::to_string(profile.r_max) + "] contains no retained lattice mode");
  }
  return f;
}

/// u = A (sin x₁ cos x₂ cos x₃, −cos x₁ sin x₂ cos x₃, 0) in units of the
/// fundamental wavenumber 2π/L; populates the eight modes m ∈ {±1}³.
inline SpectralVectorField taylor_green(const Grid& grid, double amplitude) {
  SpectralVectorField f(grid);
  if (amplitude == 0.0) return f;
  for (int s0 : {-1, 1}) {
    for (int s1 : {-1, 1}) {
      for (int s2 : {-1, 1}) {
        const std::size_t i = grid.index_of_mode(s0, s1, s2);
        f.set(i, Vec3c{Complex(0.0, -amplitude * s0 / 8.0), Complex(0.0, amplitude * s1 / 8.0), Complex{}});
      }
    }
  }
  return f;
}

/// Real shear wave 2A cos(m·x) e_dir, with dir ⟂ m required. The
/// pair ±m carries coefficient A·e_dir.
inline SpectralVectorField shear_wave(const Grid& grid, std::array<int, 3> m, int dir, double amplitude) {
  if (m[static_cast<std::size_t>(dir)] != 0) throw std::invalid_argument("shear_wave: direction must be orthogonal to m");
  SpectralVectorField f(grid);
  Vec3c c{};
  c[static_cast<std::size_t>(dir)] = amplitude;
  f.set(grid.index_of_mode(m[0], m[1], m[2]), c);
  f.set(grid.index_of_mode(-m[0], -m[1], -m[2]), c);
  return f;
}

}  // namespace critflow
