#pragma once

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <utility>
#include <vector>

#include "critflow/field.hpp"

namespace critflow {

namespace detail {

/// Process-wide cache of unaligned in-place-capable 3-D c2c plans keyed by
/// (n, direction). FFTW planning is not thread-safe, execution is.
class FftPlans {
 public:
  static fftw_plan get(int n, int sign) {
    static FftPlans instance;
    std::lock_guard<std::mutex> lock(instance.mutex_);
    auto key = std::make_pair(n, sign);
    auto it = instance.plans_.find(key);
    if (it != instance.plans_.end()) return it->second;
    std::vector<Complex> a(static_cast<std::size_t>(n) * n * n), b(a.size());
    fftw_plan p = fftw_plan_dft_3d(n, n, n, reinterpret_cast<fftw_complex*>(a.data()),
                                   reinterpret_cast<fftw_complex*>(b.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (p == nullptr) throw std::runtime_error("fftw: planning failed");
    instance.plans_.emplace(key, p);
    return p;
  }

  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

 private:
  FftPlans() = default;
  ~FftPlans() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

inline void execute(int n, int sign, const std::vector<Complex>& in, std::vector<Complex>& out) {
  out.resize(in.size());
  fftw_plan p = FftPlans::get(n, sign);
  fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in.data())),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace detail

namespace detail {

/// Cached r2c (forward) and c2r (backward) plans on the half spectrum
/// n × n × (n/2 + 1).
class RealPlans {
 public:
  static fftw_plan get(int n, bool forward) {
    static RealPlans instance;
    std::lock_guard<std::mutex> lock(instance.mutex_);
    auto key = std::make_pair(n, forward);
    auto it = instance.plans_.find(key);
    if (it != instance.plans_.end()) return it->second;
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    std::vector<double> r(nn * n);
    std::vector<Complex> c(nn * (n / 2 + 1));
    auto* cp = reinterpret_cast<fftw_complex*>(c.data());
    fftw_plan p = forward ? fftw_plan_dft_r2c_3d(n, n, n, r.data(), cp, FFTW_ESTIMATE | FFTW_UNALIGNED)
                          : fftw_plan_dft_c2r_3d(n, n, n, cp, r.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (p == nullptr) throw std::runtime_error("fftw: planning failed");
    instance.plans_.emplace(key, p);
    return p;
  }

  RealPlans(const RealPlans&) = delete;
  RealPlans& operator=(const RealPlans&) = delete;

 private:
  RealPlans() = default;
  ~RealPlans() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }
  std::mutex mutex_;
  std::map<std::pair<int, bool>, fftw_plan> plans_;
};

/// Same coefficients as forward_scalar, through a real-input transform and
/// Hermitian completion.
inline std::vector<Complex> forward_real(const Grid& g, const std::vector<double>& samples) {
  const int n = g.n();
  const int h = n / 2 + 1;
  std::vector<Complex> half(static_cast<std::size_t>(n) * n * h);
  fftw_execute_dft_r2c(RealPlans::get(n, true), const_cast<double*>(samples.data()),
                       reinterpret_cast<fftw_complex*>(half.data()));
  const double scale = 1.0 / static_cast<double>(g.size());
  std::vector<Complex> out(g.size());
  for (int j0 = 0; j0 < n; ++j0) {
    for (int j1 = 0; j1 < n; ++j1) {
      const std::size_t row = (static_cast<std::size_t>(j0) * n + j1) * h;
      const std::size_t mrow = (static_cast<std::size_t>((n - j0) % n) * n + (n - j1) % n) * h;
      for (int j2 = 0; j2 < n; ++j2) {
        out[g.index(j0, j1, j2)] = j2 < h ? half[row + j2] * scale : std::conj(half[mrow + (n - j2)]) * scale;
      }
    }
  }
  return out;
}

/// Samples of a real field from its coefficients, reading only the half
/// spectrum; exact when the coefficients are Hermitian.
inline std::vector<double> inverse_real(const Grid& g, std::span<const Complex> coeffs) {
  const int n = g.n();
  const int h = n / 2 + 1;
  std::vector<Complex> half(static_cast<std::size_t>(n) * n * h);
  for (int j0 = 0; j0 < n; ++j0) {
    for (int j1 = 0; j1 < n; ++j1) {
      const std::size_t row = (static_cast<std::size_t>(j0) * n + j1) * h;
      for (int j2 = 0; j2 < h; ++j2) half[row + j2] = coeffs[g.index(j0, j1, j2)];
    }
  }
  std::vector<double> out(g.size());
  fftw_execute_dft_c2r(RealPlans::get(n, false), reinterpret_cast<fftw_complex*>(half.data()), out.data());
  return out;
}

inline PhysicalVectorField inverse_real(const SpectralVectorField& f) {
  PhysicalVectorField u(f.grid());
  for (int a = 0; a < 3; ++a) u.values[static_cast<std::size_t>(a)] = inverse_real(f.grid(), f.component(a));
  return u;
}

}  // namespace detail

/// Coefficients of one real scalar: c_m = n^{-3} Σ_x u(x) e^{-ik·x}.
inline std::vector<Complex> forward_scalar(const Grid& g, const std::vector<double>& samples) {
  if (samples.size() != g.size()) throw std::invalid_argument("forward_transform: sample count does not match grid");
  std::vector<Complex> in(samples.begin(), samples.end()), out;
  detail::execute(g.n(), FFTW_FORWARD, in, out);
  const double scale = 1.0 / static_cast<double>(g.size());
  for (auto& c : out) c *= scale;
  return out;
}

/// Real part of Σ_m c_m e^{ik·x} on the collocation grid.
inline std::vector<double> inverse_scalar(const Grid& g, std::span<const Complex> coeffs) {
  std::vector<Complex> in(coeffs.begin(), coeffs.end()), out;
  detail::execute(g.n(), FFTW_BACKWARD, in, out);
  std::vector<double> samples(out.size());
  for (std::size_t i = 0; i < out.size(); ++i) samples[i] = out[i].real();
  return samples;
}

/// Raw coefficients, including the mean and Nyquist content of the samples,
/// so that inverse(forward(u)) == u.
inline SpectralVectorField forward_transform(const PhysicalVectorField& u) {
  SpectralVectorField f(u.grid);
  for (int a = 0; a < 3; ++a) {
    if (u.values[static_cast<std::size_t>(a)].size() != u.grid.size()) {
      throw std::invalid_argument("forward_transform: component shape does not match grid");
    }
    auto c = forward_scalar(u.grid, u.values[static_cast<std::size_t>(a)]);
    std::copy(c.begin(), c.end(), f.component(a).begin());
  }
  return f;
}

inline PhysicalVectorField inverse_transform(const SpectralVectorField& f) {
  PhysicalVectorField u(f.grid());
  for (int a = 0; a < 3; ++a) u.values[static_cast<std::size_t>(a)] = inverse_scalar(f.grid(), f.component(a));
  return u;
}

/// Physical coordinate of collocation point j along one axis.
inline double collocation_point(const Grid& g, int j) { return g.box_length() * j / g.n(); }

}  // namespace critflow
