#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace critflow {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Lattice of wavevectors k = (2π/L)·m on the periodic box [0, L)³ with
/// m_j ∈ [-n/2, n/2). Storage is row-major over (j0, j1, j2) with the FFT
/// ordering j = m mod n, which is also the layout FFTW expects.
class Grid {
 public:
  Grid(int n, double box_length) : n_(n), box_length_(box_length) {
    if (n < 4 || n % 2 != 0) {
      throw std::invalid_argument("grid: n must be an even integer >= 4, got " +
                                  std::to_string(n));
    }
    if (!(box_length > 0.0) || !std::isfinite(box_length)) {
      throw std::invalid_argument("grid: box_length must be positive and finite");
    }
    build_tables();
  }

  int n() const { return n_; }
  double box_length() const { return box_length_; }
  double spacing() const { return kTwoPi / box_length_; }
  double volume() const { return box_length_ * box_length_ * box_length_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }

  int mode_of(int j) const { return j < n_ / 2 ? j : j - n_; }
  int storage_of(int m) const { return m >= 0 ? m : m + n_; }

  std::size_t index(int j0, int j1, int j2) const {
    return (static_cast<std::size_t>(j0) * n_ + j1) * n_ + j2;
  }
  std::size_t index_of_mode(int m0, int m1, int m2) const {
    return index(storage_of(m0), storage_of(m1), storage_of(m2));
  }

  std::array<int, 3> modes(std::size_t idx) const {
    const auto& t = *tables_;
    return {t.m[0][idx], t.m[1][idx], t.m[2][idx]};
  }
  std::array<double, 3> wavevector(std::size_t idx) const {
    const auto& t = *tables_;
    return {t.k[0][idx], t.k[1][idx], t.k[2][idx]};
  }
  double k_component(int axis, std::size_t idx) const { return tables_->k[axis][idx]; }
  double k2(std::size_t idx) const { return tables_->k2[idx]; }
  double kmag(std::size_t idx) const { return tables_->kmag[idx]; }
  /// Integer |m|², the shell label independent of L.
  int shell(std::size_t idx) const { return tables_->shell[idx]; }

  bool is_nyquist(std::size_t idx) const { return tables_->nyquist[idx] != 0; }
  /// Retained by the 2/3 rule: 3|m_j| < n on every axis.
  bool is_retained(std::size_t idx) const { return tables_->retained[idx] != 0; }
  /// Storage index of -m. Nyquist planes map onto themselves.
  std::size_t mirror(std::size_t idx) const { return tables_->mirror[idx]; }

  /// Largest |k| among modes kept by the dealiasing rule.
  double max_retained_kmag() const { return tables_->max_retained_kmag; }
  double max_kmag() const { return tables_->max_kmag; }

  /// Distinct nonzero shell labels |m|² present on the lattice, ascending.
  const std::vector<int>& shells() const { return tables_->shells; }
  double shell_radius(int shell_label) const {
    return spacing() * std::sqrt(static_cast<double>(shell_label));
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.n_ == b.n_ && a.box_length_ == b.box_length_;
  }
  friend bool operator!=(const Grid& a, const Grid& b) { return !(a == b); }

  /// Same lattice of mode indices with a different box length.
  Grid with_box_length(double box_length) const { return Grid(n_, box_length); }

 private:
  struct Tables {
    std::array<std::vector<int>, 3> m;
    std::array<std::vector<double>, 3> k;
    std::vector<double> k2, kmag;
    std::vector<int> shell;
    std::vector<unsigned char> nyquist, retained;
    std::vector<std::size_t> mirror;
    std::vector<int> shells;
    double max_retained_kmag = 0.0;
    double max_kmag = 0.0;
  };

  void build_tables() {
    auto t = std::make_shared<Tables>();
    const std::size_t total = size();
    for (int a = 0; a < 3; ++a) {
      t->m[a].resize(total);
      t->k[a].resize(total);
    }
    t->k2.resize(total);
    t->kmag.resize(total);
    t->shell.resize(total);
    t->nyquist.resize(total);
    t->retained.resize(total);
    t->mirror.resize(total);
    std::vector<unsigned char> seen(static_cast<std::size_t>(3 * (n_ / 2) * (n_ / 2)) + 1, 0);
    const double dk = spacing();
    for (int j0 = 0; j0 < n_; ++j0) {
      for (int j1 = 0; j1 < n_; ++j1) {
        for (int j2 = 0; j2 < n_; ++j2) {
          const std::size_t idx = index(j0, j1, j2);
          const std::array<int, 3> m{mode_of(j0), mode_of(j1), mode_of(j2)};
          int sq = 0;
          bool nyq = false;
          bool keep = true;
          for (int a = 0; a < 3; ++a) {
            t->m[a][idx] = m[a];
            t->k[a][idx] = dk * m[a];
            sq += m[a] * m[a];
            nyq = nyq || m[a] == -n_ / 2;
            keep = keep && 3 * std::abs(m[a]) < n_;
          }
          t->shell[idx] = sq;
          t->k2[idx] = dk * dk * sq;
          t->kmag[idx] = dk * std::sqrt(static_cast<double>(sq));
          t->nyquist[idx] = nyq ? 1 : 0;
          t->retained[idx] = keep ? 1 : 0;
          t->mirror[idx] = index((n_ - j0) % n_, (n_ - j1) % n_, (n_ - j2) % n_);
          if (sq > 0) seen[static_cast<std::size_t>(sq)] = 1;
          if (keep) t->max_retained_kmag = std::max(t->max_retained_kmag, t->kmag[idx]);
          t->max_kmag = std::max(t->max_kmag, t->kmag[idx]);
        }
      }
    }
    for (std::size_t s = 1; s < seen.size(); ++s) {
      if (seen[s]) t->shells.push_back(static_cast<int>(s));
    }
    tables_ = std::move(t);
  }

  int n_;
  double box_length_;
  std::shared_ptr<const Tables> tables_;
};

inline Grid make_grid(int n, double box_length) { return Grid(n, box_length); }

}  // namespace critflow
