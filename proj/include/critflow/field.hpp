#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "critflow/grid.hpp"

namespace critflow {

using Complex = std::complex<double>;
using Vec3c = std::array<Complex, 3>;

/// Three-component velocity in Fourier-series form, u(x) = Σ_k c_k e^{ik·x}.
/// A plain value type; operations return new fields.
class SpectralVectorField {
 public:
  explicit SpectralVectorField(Grid grid) : grid_(std::move(grid)) {
    for (auto& comp : coeffs_) comp.assign(grid_.size(), Complex{});
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return grid_.size(); }

  std::span<const Complex> component(int a) const { return coeffs_[static_cast<std::size_t>(a)]; }
  std::span<Complex> component(int a) { return coeffs_[static_cast<std::size_t>(a)]; }

  Vec3c at(std::size_t idx) const { return {coeffs_[0][idx], coeffs_[1][idx], coeffs_[2][idx]}; }
  void set(std::size_t idx, const Vec3c& v) {
    for (int a = 0; a < 3; ++a) coeffs_[static_cast<std::size_t>(a)][idx] = v[static_cast<std::size_t>(a)];
  }

  /// Euclidean magnitude of the 3-vector coefficient at idx.
  double magnitude(std::size_t idx) const { return std::sqrt(magnitude2(idx)); }
  double magnitude2(std::size_t idx) const {
    return std::norm(coeffs_[0][idx]) + std::norm(coeffs_[1][idx]) + std::norm(coeffs_[2][idx]);
  }

  bool is_zero() const {
    for (const auto& comp : coeffs_) {
      for (const auto& c : comp) {
        if (c != Complex{}) return false;
      }
    }
    return true;
  }

  SpectralVectorField& operator+=(const SpectralVectorField& o) {
    require_same_grid(o);
    for (int a = 0; a < 3; ++a) {
      auto& dst = coeffs_[static_cast<std::size_t>(a)];
      const auto& src = o.coeffs_[static_cast<std::size_t>(a)];
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    }
    return *this;
  }
  SpectralVectorField& operator-=(const SpectralVectorField& o) {
    require_same_grid(o);
    for (int a = 0; a < 3; ++a) {
      auto& dst = coeffs_[static_cast<std::size_t>(a)];
      const auto& src = o.coeffs_[static_cast<std::size_t>(a)];
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= src[i];
    }
    return *this;
  }
  SpectralVectorField& operator*=(double s) {
    for (auto& comp : coeffs_) {
      for (auto& c : comp) c *= s;
    }
    return *this;
  }

  friend SpectralVectorField operator+(SpectralVectorField a, const SpectralVectorField& b) { return a += b; }
  friend SpectralVectorField operator-(SpectralVectorField a, const SpectralVectorField& b) { return a -= b; }
  friend SpectralVectorField operator*(double s, SpectralVectorField a) { return a *= s; }

  friend bool operator==(const SpectralVectorField& a, const SpectralVectorField& b) {
    return a.grid_ == b.grid_ && a.coeffs_ == b.coeffs_;
  }

  void require_same_grid(const SpectralVectorField& o) const {
    if (o.grid_ != grid_) throw std::invalid_argument("field grids differ");
  }

  /// Same coefficients attached to a grid with the same n (used by the
  /// lattice rescaling, which only changes the box length).
  SpectralVectorField rebased(const Grid& grid) const {
    if (grid.n() != grid_.n()) throw std::invalid_argument("rebased: mode count differs");
    SpectralVectorField out(grid);
    out.coeffs_ = coeffs_;
    return out;
  }

 private:
  Grid grid_;
  std::array<std::vector<Complex>, 3> coeffs_;
};

/// Real samples of a vector field on the n³ collocation points x = L·j/n.
struct PhysicalVectorField {
  Grid grid;
  std::array<std::vector<double>, 3> values;

  explicit PhysicalVectorField(Grid g) : grid(std::move(g)) {
    for (auto& v : values) v.assign(grid.size(), 0.0);
  }
};

/// Largest deviation from the structural invariants of a state.
struct FieldDiagnostics {
  double hermitian_error = 0.0;   // max |c_{-k} - conj(c_k)| / max|c|
  double mean_magnitude = 0.0;    // |c_0|
  double divergence_error = 0.0;  // max |k·c_k| / (|k||c_k|) over k ≠ 0
  double nyquist_magnitude = 0.0;
};

inline FieldDiagnostics diagnose(const SpectralVectorField& f) {
  FieldDiagnostics d;
  const Grid& g = f.grid();
  double cmax = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) cmax = std::max(cmax, f.magnitude(i));
  d.mean_magnitude = f.magnitude(0);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const std::size_t j = g.mirror(i);
    double herm = 0.0;
    for (int a = 0; a < 3; ++a) {
      herm += std::norm(f.component(a)[j] - std::conj(f.component(a)[i]));
    }
    if (cmax > 0.0) d.hermitian_error = std::max(d.hermitian_error, std::sqrt(herm) / cmax);
    if (g.is_nyquist(i)) d.nyquist_magnitude = std::max(d.nyquist_magnitude, f.magnitude(i));
    const double mag = f.magnitude(i);
    if (i != 0 && mag > 0.0) {
      Complex div{};
      for (int a = 0; a < 3; ++a) div += g.k_component(a, i) * f.component(a)[i];
      d.divergence_error = std::max(d.divergence_error, std::abs(div) / (g.kmag(i) * mag));
    }
  }
  return d;
}

/// Zeroes the mean and Nyquist planes; the result is a legal solver state
/// when the input is real and divergence-free.
inline SpectralVectorField sanitized(SpectralVectorField f) {
  const Grid& g = f.grid();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i == 0 || g.is_nyquist(i)) f.set(i, Vec3c{});
  }
  return f;
}

}  // namespace critflow
