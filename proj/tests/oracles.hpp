#pragma once

// Brute-force reference computations used by the unit tests and the
// acceptance binary. Nothing here calls into the FFT layer.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "critflow/field.hpp"
#include "critflow/initial_data.hpp"

namespace oracle {

using critflow::Complex;
using critflow::Grid;
using critflow::SpectralVectorField;
using critflow::Vec3c;

/// c_m = n^{-3} Σ_x u(x) e^{-i m·j 2π/n}, O(n⁶).
inline std::vector<Complex> direct_dft(const Grid& g, const std::vector<double>& samples) {
  const int n = g.n();
  std::vector<Complex> out(g.size());
  const double w = 2.0 * std::numbers::pi / n;
  for (int a0 = 0; a0 < n; ++a0)
    for (int a1 = 0; a1 < n; ++a1)
      for (int a2 = 0; a2 < n; ++a2) {
        Complex acc{};
        for (int j0 = 0; j0 < n; ++j0)
          for (int j1 = 0; j1 < n; ++j1)
            for (int j2 = 0; j2 < n; ++j2) {
              const double phase = -w * (a0 * j0 + a1 * j1 + a2 * j2);
              acc += samples[g.index(j0, j1, j2)] * Complex(std::cos(phase), std::sin(phase));
            }
        out[g.index(a0, a1, a2)] = acc / static_cast<double>(g.size());
      }
  return out;
}

/// Σ_m c_m e^{ik·x} evaluated at collocation point j by direct summation.
inline Vec3c direct_eval(const SpectralVectorField& f, int j0, int j1, int j2) {
  const Grid& g = f.grid();
  const double w = 2.0 * std::numbers::pi / g.n();
  Vec3c v{};
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto m = g.modes(i);
    const double phase = w * (m[0] * j0 + m[1] * j1 + m[2] * j2);
    const Complex e(std::cos(phase), std::sin(phase));
    for (int a = 0; a < 3; ++a) v[static_cast<std::size_t>(a)] += f.component(a)[i] * e;
  }
  return v;
}

/// ℙ(u·∇u) as an exact Galerkin convolution over retained output modes:
/// coefficient at q is ℙ_q Σ_{p+p'=q} i(k_q·c_p) c_{p'}, summed over all pairs.
inline SpectralVectorField galerkin_nonlinear(const SpectralVectorField& u) {
  const Grid& g = u.grid();
  const int n = g.n();
  SpectralVectorField out(g);
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (g.is_retained(i) && u.magnitude2(i) > 0.0) support.push_back(i);
  }
  for (std::size_t p : support) {
    const auto mp = g.modes(p);
    const Vec3c cp = u.at(p);
    for (std::size_t pp : support) {
      const auto mq = g.modes(pp);
      const int q0 = mp[0] + mq[0], q1 = mp[1] + mq[1], q2 = mp[2] + mq[2];
      if (3 * std::abs(q0) >= n || 3 * std::abs(q1) >= n || 3 * std::abs(q2) >= n) continue;
      if (q0 == 0 && q1 == 0 && q2 == 0) continue;
      const std::size_t q = g.index_of_mode(q0, q1, q2);
      const auto k = g.wavevector(q);
      const Complex kc = k[0] * cp[0] + k[1] * cp[1] + k[2] * cp[2];
      const Vec3c cq = u.at(pp);
      Vec3c acc = out.at(q);
      for (std::size_t a = 0; a < 3; ++a) acc[a] += Complex(0.0, 1.0) * kc * cq[a];
      out.set(q, acc);
    }
  }
  for (std::size_t q = 1; q < out.size(); ++q) {
    Vec3c v = out.at(q);
    const auto k = g.wavevector(q);
    const Complex s = (k[0] * v[0] + k[1] * v[1] + k[2] * v[2]) / g.k2(q);
    for (std::size_t a = 0; a < 3; ++a) v[a] -= s * k[a];
    out.set(q, v);
  }
  return out;
}

/// Max coefficient magnitude difference over max coefficient magnitude of b.
inline double rel_diff(const SpectralVectorField& a, const SpectralVectorField& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    Vec3c d = a.at(i), bb = b.at(i);
    double e = 0.0;
    for (std::size_t c = 0; c < 3; ++c) e += std::norm(d[c] - bb[c]);
    num = std::max(num, std::sqrt(e));
    den = std::max(den, b.magnitude(i));
  }
  return den > 0.0 ? num / den : num;
}

/// Random divergence-free field supported on lattice radii [1, r_max].
inline SpectralVectorField random_field(const Grid& g, std::uint64_t seed, double r_max = 2.5, double amp = 1.0) {
  critflow::SpectrumProfile p;
  p.r_min = 1.0;
  p.r_max = r_max;
  p.amplitude = amp;
  p.jitter = 0.5;
  p.seed = seed;
  return critflow::random_divfree_field(g, p);
}

}  // namespace oracle
