#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "critflow/fft.hpp"
#include "critflow/field.hpp"
#include "critflow/spectral_ops.hpp"

namespace critflow {

struct FluidParams {
  double nu = 1.0;
};

inline void require_viscosity(double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw std::invalid_argument("viscosity must be positive");
}

struct StepScheme {
  enum class Kind { exponential_euler, etdrk2 };
  Kind kind = Kind::etdrk2;
  double dt = 1e-3;

  int order() const { return kind == Kind::etdrk2 ? 2 : 1; }
};

inline std::string to_string(StepScheme::Kind k) {
  return k == StepScheme::Kind::etdrk2 ? "etdrk2" : "exponential_euler";
}

inline StepScheme::Kind parse_scheme_kind(const std::string& s) {
  if (s == "etdrk2") return StepScheme::Kind::etdrk2;
  if (s == "exponential_euler") return StepScheme::Kind::exponential_euler;
  throw std::invalid_argument("unknown scheme kind '" + s + "'");
}

/// Raised when the state stops being finite or the stability guard trips.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double time)
      : std::runtime_error(what + " at t=" + std::to_string(time)), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// e^{νtΔ}: c_k ↦ e^{-νt|k|²} c_k.
inline SpectralVectorField heat_semigroup(SpectralVectorField f, double nu, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("heat_semigroup: time must be nonnegative");
  if (t == 0.0) return f;
  const Grid& g = f.grid();
  for (int a = 0; a < 3; ++a) {
    auto c = f.component(a);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] *= std::exp(-nu * t * g.k2(i));
  }
  return f;
}

namespace detail {

inline double phi1(double z) {
  if (z == 0.0) return 1.0;
  return std::expm1(z) / z;
}

/// (e^z - 1 - z)/z², by Taylor series where the closed form cancels.
inline double phi2(double z) {
  if (std::abs(z) < 0.1) {
    double term = 0.5, sum = 0.0;
    for (int j = 0; j < 12; ++j) {
      sum += term;
      term *= z / (j + 3);
    }
    return sum;
  }
  return (std::expm1(z) - z) / (z * z);
}

/// Per-mode factors of the exponential integrators for fixed (grid, ν, dt).
struct EtdTable {
  std::vector<double> decay, phi1, phi2;

  EtdTable(const Grid& g, double nu, double dt) : decay(g.size()), phi1(g.size()), phi2(g.size()) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double z = -nu * g.k2(i) * dt;
      decay[i] = std::exp(z);
      phi1[i] = detail::phi1(z);
      phi2[i] = detail::phi2(z);
    }
  }
};

inline void require_finite(const SpectralVectorField& f, double t) {
  for (int a = 0; a < 3; ++a) {
    for (const auto& c : f.component(a)) {
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
        throw IntegrationError("integration failure: non-finite coefficient", t);
      }
    }
  }
}

inline SpectralVectorField step_with(const SpectralVectorField& u, const StepScheme& scheme, const EtdTable& tab,
                                     bool nonlinear) {
  const double h = scheme.dt;
  SpectralVectorField a = u;
  if (!nonlinear) {
    for (int c = 0; c < 3; ++c) {
      auto ac = a.component(c);
      for (std::size_t i = 0; i < ac.size(); ++i) ac[i] *= tab.decay[i];
    }
    return a;
  }
  const SpectralVectorField n0 = nonlinear_term(u);
  for (int c = 0; c < 3; ++c) {
    auto ac = a.component(c);
    const auto nc = n0.component(c);
    for (std::size_t i = 0; i < ac.size(); ++i) ac[i] = tab.decay[i] * ac[i] - h * tab.phi1[i] * nc[i];
  }
  if (scheme.kind == StepScheme::Kind::exponential_euler) return a;
  const SpectralVectorField n1 = nonlinear_term(a);
  for (int c = 0; c < 3; ++c) {
    auto ac = a.component(c);
    const auto n0c = n0.component(c);
    const auto n1c = n1.component(c);
    for (std::size_t i = 0; i < ac.size(); ++i) ac[i] -= h * tab.phi2[i] * (n1c[i] - n0c[i]);
  }
  return a;
}

}  // namespace detail

/// Maximum pointwise speed max_x |u(x)| on the collocation grid.
inline double max_speed(const SpectralVectorField& u) {
  const auto p = inverse_transform(u);
  double m = 0.0;
  for (std::size_t x = 0; x < u.size(); ++x) {
    const double s = p.values[0][x] * p.values[0][x] + p.values[1][x] * p.values[1][x] + p.values[2][x] * p.values[2][x];
    m = std::max(m, s);
  }
  return std::sqrt(m);
}

/// Explicit-nonlinearity stability guard: dt ≤ 0.5 / (max|k| · max|u|).
inline void check_cfl(const SpectralVectorField& u, double dt, double t) {
  const double speed = max_speed(u);
  if (speed == 0.0) return;
  const double limit = 0.5 / (u.grid().max_retained_kmag() * speed);
  if (dt > limit) {
    throw IntegrationError("stability guard: dt=" + std::to_string(dt) + " exceeds " + std::to_string(limit), t);
  }
}

/// Rejects states that are not legal solver inputs.
inline void require_state(const SpectralVectorField& u, double tol = 1e-10) {
  const auto d = diagnose(u);
  if (d.mean_magnitude != 0.0) throw std::invalid_argument("state must have zero mean");
  if (d.nyquist_magnitude != 0.0) throw std::invalid_argument("state must have empty Nyquist planes");
  if (d.divergence_error > tol) throw std::invalid_argument("state must be divergence-free");
  if (d.hermitian_error > tol) throw std::invalid_argument("state must be real (Hermitian-symmetric)");
}

/// One exponential-integrator step of the mild form
/// u(t+h) = e^{νhΔ}u(t) − ∫₀ʰ e^{ν(h−s)Δ} ℙ(u·∇u)(t+s) ds.
inline SpectralVectorField step(const SpectralVectorField& u, const StepScheme& scheme, double nu,
                                bool nonlinear = true, double t = 0.0) {
  require_viscosity(nu);
  if (!(scheme.dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  const detail::EtdTable tab(u.grid(), nu, scheme.dt);
  auto out = detail::step_with(u, scheme, tab, nonlinear);
  detail::require_finite(out, t + scheme.dt);
  return out;
}

struct Trajectory {
  std::vector<double> times;
  std::vector<SpectralVectorField> states;
  FluidParams params;
  StepScheme scheme;
  bool nonlinear = true;

  const Grid& grid() const { return states.front().grid(); }
  std::size_t size() const { return times.size(); }
};

struct IntegrateOptions {
  bool nonlinear = true;
  bool cfl_guard = true;
};

/// Number of steps of size dt that make up `span`; rejects non-multiples.
inline long long steps_for(double span, double dt, const char* what) {
  const double ratio = span / dt;
  const long long steps = std::llround(ratio);
  if (steps < 0 || std::abs(ratio - static_cast<double>(steps)) > 1e-6 * std::max(1.0, ratio)) {
    throw std::invalid_argument(std::string(what) + " must be a nonnegative multiple of dt");
  }
  return steps;
}

/// Time-steps u0 to t_end and hands every sampled state to `observe`
/// (t = 0 included, t_end always included).
inline void integrate(const SpectralVectorField& u0, double nu, const StepScheme& scheme, double t_end,
                      double sample_every, const std::function<void(double, const SpectralVectorField&)>& observe,
                      IntegrateOptions opts = {}) {
  require_viscosity(nu);
  if (!(scheme.dt > 0.0)) throw std::invalid_argument("scheme.dt must be positive");
  if (!(t_end >= 0.0)) throw std::invalid_argument("t_end must be nonnegative");
  if (!(sample_every > 0.0)) throw std::invalid_argument("sample_every must be positive");
  require_state(u0);
  const long long total = steps_for(t_end, scheme.dt, "t_end");
  const long long stride = std::max<long long>(1, steps_for(sample_every, scheme.dt, "sample_every"));
  const detail::EtdTable tab(u0.grid(), nu, scheme.dt);
  SpectralVectorField u = u0;
  if (opts.nonlinear && opts.cfl_guard) check_cfl(u, scheme.dt, 0.0);
  observe(0.0, u);
  for (long long s = 1; s <= total; ++s) {
    u = detail::step_with(u, scheme, tab, opts.nonlinear);
    const double t = static_cast<double>(s) * scheme.dt;
    if (s % stride == 0 || s == total) {
      detail::require_finite(u, t);
      if (opts.nonlinear && opts.cfl_guard) check_cfl(u, scheme.dt, t);
      observe(t, u);
    }
  }
}

inline Trajectory simulate(const SpectralVectorField& u0, double nu, const StepScheme& scheme, double t_end,
                           double sample_every, IntegrateOptions opts = {}) {
  Trajectory traj;
  traj.params.nu = nu;
  traj.scheme = scheme;
  traj.nonlinear = opts.nonlinear;
  integrate(
      u0, nu, scheme, t_end, sample_every,
      [&](double t, const SpectralVectorField& u) {
        traj.times.push_back(t);
        traj.states.push_back(u);
      },
      opts);
  return traj;
}

}  // namespace critflow
