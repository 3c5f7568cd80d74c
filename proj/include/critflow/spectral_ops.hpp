#pragma once

#include <array>
#include <vector>

#include "critflow/fft.hpp"
#include "critflow/field.hpp"

namespace critflow {

/// Per-mode projection c ↦ (I - k kᵀ/|k|²) c; the k = 0 mode is zeroed.
inline SpectralVectorField leray_project(SpectralVectorField f) {
  const Grid& g = f.grid();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i == 0) {
      f.set(i, Vec3c{});
      continue;
    }
    const auto k = g.wavevector(i);
    const Vec3c c = f.at(i);
    const Complex kc = k[0] * c[0] + k[1] * c[1] + k[2] * c[2];
    const Complex s = kc / g.k2(i);
    f.set(i, Vec3c{c[0] - s * k[0], c[1] - s * k[1], c[2] - s * k[2]});
  }
  return f;
}

/// 2/3-rule truncation: keeps modes with 3|m_j| < n on every axis. Nyquist
/// planes are never retained.
inline SpectralVectorField dealias(SpectralVectorField f) {
  const Grid& g = f.grid();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!g.is_retained(i)) f.set(i, Vec3c{});
  }
  return f;
}

/// ∂_axis of every component.
inline SpectralVectorField derivative(SpectralVectorField f, int axis) {
  const Grid& g = f.grid();
  for (int a = 0; a < 3; ++a) {
    auto c = f.component(a);
    for (std::size_t i = 0; i < f.size(); ++i) {
      c[i] *= Complex(0.0, g.is_nyquist(i) ? 0.0 : g.k_component(axis, i));
    }
  }
  return f;
}

namespace detail {

/// ℙ D applied to ∂_j T_{ji} where T_{ji} are the coefficients of the
/// product tensor, indexed products[j][i].
inline SpectralVectorField project_divergence(const Grid& g,
                                              const std::array<std::array<const std::vector<Complex>*, 3>, 3>& products) {
  SpectralVectorField out(g);
  for (std::size_t idx = 0; idx < g.size(); ++idx) {
    if (idx == 0 || !g.is_retained(idx)) continue;
    const auto k = g.wavevector(idx);
    Vec3c v{};
    for (int i = 0; i < 3; ++i) {
      Complex acc{};
      for (int j = 0; j < 3; ++j) acc += k[static_cast<std::size_t>(j)] * (*products[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)])[idx];
      v[static_cast<std::size_t>(i)] = Complex(0.0, 1.0) * acc;
    }
    const Complex kv = k[0] * v[0] + k[1] * v[1] + k[2] * v[2];
    const Complex s = kv / g.k2(idx);
    out.set(idx, Vec3c{v[0] - s * k[0], v[1] - s * k[1], v[2] - s * k[2]});
  }
  return out;
}

}  // namespace detail

/// ℙ(f·∇g) computed pseudo-spectrally in divergence form ∂_j(f_j g_i).
/// Inputs are truncated by the 2/3 rule before the product and the result is
/// truncated again, so for retained inputs it equals the exact Galerkin term.
inline SpectralVectorField advection_term(const SpectralVectorField& f, const SpectralVectorField& g) {
  f.require_same_grid(g);
  const Grid& grid = f.grid();
  const auto fp = detail::inverse_real(dealias(f));
  const auto gp = detail::inverse_real(dealias(g));
  std::array<std::array<std::vector<Complex>, 3>, 3> prod;
  std::vector<double> buf(grid.size());
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t x = 0; x < buf.size(); ++x) buf[x] = fp.values[j][x] * gp.values[i][x];
      prod[j][i] = detail::forward_real(grid, buf);
    }
  }
  std::array<std::array<const std::vector<Complex>*, 3>, 3> view{};
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t i = 0; i < 3; ++i) view[j][i] = &prod[j][i];
  }
  return detail::project_divergence(grid, view);
}

/// ℙ(u·∇u) = ℙ div(u⊗u), using the six distinct products of the symmetric tensor.
inline SpectralVectorField nonlinear_term(const SpectralVectorField& u) {
  const Grid& grid = u.grid();
  const auto up = detail::inverse_real(dealias(u));
  std::array<std::vector<Complex>, 6> prod;
  std::array<std::array<const std::vector<Complex>*, 3>, 3> view{};
  std::vector<double> buf(grid.size());
  std::size_t slot = 0;
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t i = j; i < 3; ++i) {
      for (std::size_t x = 0; x < buf.size(); ++x) buf[x] = up.values[j][x] * up.values[i][x];
      prod[slot] = detail::forward_real(grid, buf);
      view[j][i] = &prod[slot];
      view[i][j] = &prod[slot];
      ++slot;
    }
  }
  return detail::project_divergence(grid, view);
}

/// Coefficient inner product Σ_k Re(c_k · conj(d_k)); the L² inner product is
/// this times the box volume.
inline double coefficient_inner(const SpectralVectorField& a, const SpectralVectorField& b) {
  a.require_same_grid(b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (int c = 0; c < 3; ++c) s += (a.component(c)[i] * std::conj(b.component(c)[i])).real();
  }
  return s;
}

}  // namespace critflow
