#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "critflow/field.hpp"

namespace critflow {

// All norms are stated in Fourier-series coefficients c_k. Sums run in
// storage order so results are reproducible bit for bit.

/// ‖f‖_{X^σ} = Σ_{k≠0} |k|^σ |c_k|.
inline double x_norm(const SpectralVectorField& f, double sigma) {
  if (!(sigma > -3.0)) {
    throw std::invalid_argument("x_norm: sigma must exceed -3, got " + std::to_string(sigma));
  }
  const Grid& g = f.grid();
  double s = 0.0;
  for (std::size_t i = 1; i < f.size(); ++i) {
    const double m = f.magnitude(i);
    if (m == 0.0) continue;
    s += std::pow(g.kmag(i), sigma) * m;
  }
  return s;
}

/// ‖f‖_{L²} = (L³ Σ_k |c_k|²)^{1/2}, i.e. (volume × mean-square)^{1/2}.
inline double l2_norm(const SpectralVectorField& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f.magnitude2(i);
  return std::sqrt(f.grid().volume() * s);
}

/// ‖f‖_{Ḣ^s} = (L³ Σ_{k≠0} |k|^{2s} |c_k|²)^{1/2}.
inline double hs_dot_norm(const SpectralVectorField& f, double s) {
  const Grid& g = f.grid();
  double acc = 0.0;
  for (std::size_t i = 1; i < f.size(); ++i) {
    const double m2 = f.magnitude2(i);
    if (m2 == 0.0) continue;
    acc += std::pow(g.k2(i), s) * m2;
  }
  return std::sqrt(g.volume() * acc);
}

/// Σ_{k≠0} e^{r|k|} |k|^σ |c_k|. Throws when e^{r|k|} would overflow on the grid.
inline double gevrey_norm(const SpectralVectorField& f, double radius, double sigma) {
  if (!(radius >= 0.0)) throw std::invalid_argument("gevrey_norm: radius must be nonnegative");
  if (radius == 0.0) return x_norm(f, sigma);
  const Grid& g = f.grid();
  if (radius * g.max_kmag() > std::log(std::numeric_limits<double>::max()) - 1.0) {
    throw std::overflow_error("gevrey_norm: e^{r|k|} overflows for radius " + std::to_string(radius));
  }
  double s = 0.0;
  for (std::size_t i = 1; i < f.size(); ++i) {
    const double m = f.magnitude(i);
    if (m == 0.0) continue;
    s += std::exp(radius * g.kmag(i)) * std::pow(g.kmag(i), sigma) * m;
  }
  return s;
}

/// ‖e^{r|D|} f‖_{X^{-1}}; radius 0 is exactly x_norm(f, -1).
inline double gevrey_xm1_norm(const SpectralVectorField& f, double radius) {
  return gevrey_norm(f, radius, -1.0);
}

struct FilterSpec {
  double delta;
};

inline void require_filter(const FilterSpec& spec) {
  if (!(spec.delta > 0.0)) throw std::invalid_argument("filter: delta must be positive");
}

/// A_δ: keeps |k| ≤ δ (the boundary shell belongs to the low part).
inline SpectralVectorField low_pass(SpectralVectorField f, FilterSpec spec) {
  require_filter(spec);
  const Grid& g = f.grid();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (g.kmag(i) > spec.delta) f.set(i, Vec3c{});
  }
  return f;
}

/// B_δ: keeps |k| > δ.
inline SpectralVectorField high_pass(SpectralVectorField f, FilterSpec spec) {
  require_filter(spec);
  const Grid& g = f.grid();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (g.kmag(i) <= spec.delta) f.set(i, Vec3c{});
  }
  return f;
}

/// Σ_{0<|k|≤λ} |k|^σ |c_k|, the low-frequency piece of the X^σ norm.
inline double x_norm_below(const SpectralVectorField& f, double sigma, double lambda) {
  const Grid& g = f.grid();
  double s = 0.0;
  for (std::size_t i = 1; i < f.size(); ++i) {
    if (g.kmag(i) > lambda) continue;
    const double m = f.magnitude(i);
    if (m != 0.0) s += std::pow(g.kmag(i), sigma) * m;
  }
  return s;
}

/// Σ_{|k|>λ} |k|^σ |c_k|.
inline double x_norm_above(const SpectralVectorField& f, double sigma, double lambda) {
  const Grid& g = f.grid();
  double s = 0.0;
  for (std::size_t i = 1; i < f.size(); ++i) {
    if (g.kmag(i) <= lambda) continue;
    const double m = f.magnitude(i);
    if (m != 0.0) s += std::pow(g.kmag(i), sigma) * m;
  }
  return s;
}

/// Norm selector used by the CLI and the series recorder.
struct NormSpec {
  enum class Kind { lei_lin, l2, sobolev_dot, gevrey_xm1 };
  Kind kind = Kind::l2;
  double param = 0.0;  // σ, s or radius

  static NormSpec lei_lin(double sigma) { return {Kind::lei_lin, sigma}; }
  static NormSpec l2() { return {Kind::l2, 0.0}; }
  static NormSpec sobolev_dot(double s) { return {Kind::sobolev_dot, s}; }
  static NormSpec gevrey(double radius) { return {Kind::gevrey_xm1, radius}; }
};

inline double evaluate_norm(const SpectralVectorField& f, const NormSpec& spec) {
  switch (spec.kind) {
    case NormSpec::Kind::lei_lin: return x_norm(f, spec.param);
    case NormSpec::Kind::l2: return l2_norm(f);
    case NormSpec::Kind::sobolev_dot: return hs_dot_norm(f, spec.param);
    case NormSpec::Kind::gevrey_xm1: return gevrey_xm1_norm(f, spec.param);
  }
  throw std::logic_error("evaluate_norm: unknown kind");
}

/// Lattice sum Σ_{0<|k|≤λ} |k|^{2σ}, the discrete counterpart of ∫_{|ξ|<λ}|ξ|^{2σ}dξ.
inline double lattice_ball_sum(const Grid& g, double sigma, double lambda) {
  double s = 0.0;
  for (std::size_t i = 1; i < g.size(); ++i) {
    if (g.kmag(i) <= lambda) s += std::pow(g.k2(i), sigma);
  }
  return s;
}

}  // namespace critflow
