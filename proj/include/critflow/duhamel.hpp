#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "critflow/lemmas.hpp"
#include "critflow/norms.hpp"
#include "critflow/solver.hpp"
#include "critflow/time_norms.hpp"

namespace critflow {

/// State at time t, linearly interpolated in coefficient space.
inline SpectralVectorField state_at(const Trajectory& traj, double t) {
  if (traj.size() == 0) throw std::invalid_argument("state_at: empty trajectory");
  const double tol = 1e-12 * std::max(1.0, traj.times.back());
  if (t < -tol || t > traj.times.back() + tol) throw std::out_of_range("state_at: t outside trajectory span");
  if (t <= traj.times.front()) return traj.states.front();
  if (t >= traj.times.back()) return traj.states.back();
  const auto it = std::upper_bound(traj.times.begin(), traj.times.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - traj.times.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - traj.times[lo]) / (traj.times[hi] - traj.times[lo]);
  SpectralVectorField out = traj.states[lo];
  out *= 1.0 - w;
  SpectralVectorField b = traj.states[hi];
  b *= w;
  out += b;
  return out;
}

/// Composite-trapezoid value of ∫₀ᵗ e^{ν(t−z)Δ} ℙ(u·∇u)(z) dz on quad_points nodes.
inline SpectralVectorField duhamel_oracle(const Trajectory& traj, double t, int quad_points) {
  if (quad_points < 2) throw std::invalid_argument("duhamel_oracle: quad_points must be at least 2");
  if (traj.size() == 0) throw std::invalid_argument("duhamel_oracle: empty trajectory");
  if (t < 0.0 || t > traj.times.back() * (1.0 + 1e-12)) throw std::out_of_range("duhamel_oracle: t outside trajectory span");
  const double nu = traj.params.nu;
  SpectralVectorField acc(traj.grid());
  if (t == 0.0) return acc;
  const double h = t / (quad_points - 1);
  for (int q = 0; q < quad_points; ++q) {
    const double z = (q == quad_points - 1) ? t : h * q;
    const double w = (q == 0 || q == quad_points - 1) ? 0.5 * h : h;
    auto term = heat_semigroup(nonlinear_term(state_at(traj, z)), nu, t - z);
    term *= w;
    acc += term;
  }
  return acc;
}

/// Per-sample values of I(t) = ∫₀ᵗ e^{ν(t−z)Δ} F(z) dz for samples F_i on the
/// mesh, by the exponential trapezoid recursion
/// I_{i+1} = e^{νhΔ}I_i + h/2 (e^{νhΔ}F_i + F_{i+1}).
inline std::vector<SpectralVectorField> duhamel_accumulate(const std::vector<double>& times,
                                                           const std::vector<SpectralVectorField>& forcing,
                                                           double nu) {
  if (times.size() != forcing.size() || times.empty()) throw std::invalid_argument("duhamel_accumulate: mesh mismatch");
  std::vector<SpectralVectorField> out;
  out.reserve(times.size());
  out.emplace_back(forcing.front().grid());
  for (std::size_t i = 1; i < times.size(); ++i) {
    const double h = times[i] - times[i - 1];
    SpectralVectorField next = heat_semigroup(out.back(), nu, h);
    SpectralVectorField left = heat_semigroup(forcing[i - 1], nu, h);
    left += forcing[i];
    left *= 0.5 * h;
    next += left;
    out.push_back(std::move(next));
  }
  return out;
}

/// Mixed-norm statistics of a trajectory over the samples with t ≤ T.
struct TimeNormStats {
  double linf_l2 = 0.0;
  double linf_xm1 = 0.0;
  double l1_x1 = 0.0;
};

inline TimeNormStats time_norm_stats(const std::vector<double>& times, const std::vector<SpectralVectorField>& states,
                                     std::size_t count) {
  std::vector<double> l2(count), xm1(count), x1(count);
  for (std::size_t i = 0; i < count; ++i) {
    l2[i] = l2_norm(states[i]);
    xm1[i] = x_norm(states[i], -1.0);
    x1[i] = x_norm(states[i], 1.0);
  }
  const std::span<const double> ts(times.data(), count);
  return {linf_in_time(l2), linf_in_time(xm1), trapezoid(ts, x1)};
}

namespace detail {

struct BilinearData {
  std::vector<double> times;
  std::vector<SpectralVectorField> duhamel;
  TimeNormStats f, g;
};

inline BilinearData bilinear_data(const Trajectory& f, const Trajectory& g, double T) {
  if (f.size() == 0 || g.size() == 0) throw std::invalid_argument("verify_enq: empty trajectory");
  if (f.times != g.times) throw std::invalid_argument("verify_enq: trajectories must share a time mesh");
  if (f.grid() != g.grid()) throw std::invalid_argument("verify_enq: trajectories must share a grid");
  if (f.params.nu != g.params.nu) throw std::invalid_argument("verify_enq: trajectories must share a viscosity");
  const std::size_t count = samples_through(f.times, T);
  BilinearData d;
  d.times.assign(f.times.begin(), f.times.begin() + static_cast<std::ptrdiff_t>(count));
  std::vector<SpectralVectorField> forcing;
  forcing.reserve(count);
  for (std::size_t i = 0; i < count; ++i) forcing.push_back(advection_term(f.states[i], g.states[i]));
  d.duhamel = duhamel_accumulate(d.times, forcing, f.params.nu);
  d.f = time_norm_stats(f.times, f.states, count);
  d.g = time_norm_stats(g.times, g.states, count);
  return d;
}

}  // namespace detail

/// sup_t ‖∫₀ᵗ e^{ν(t−z)Δ}ℙ(f·∇g)‖_{X^{-1}} ≤ (‖f‖_{L^∞X^{-1}}‖f‖_{L¹X¹}‖g‖_{L^∞X^{-1}}‖g‖_{L¹X¹})^{1/2}.
inline InequalityReport verify_enq1(const Trajectory& f, const Trajectory& g, double T) {
  const auto d = detail::bilinear_data(f, g, T);
  double lhs = 0.0;
  for (const auto& s : d.duhamel) lhs = std::max(lhs, x_norm(s, -1.0));
  const double rhs = std::sqrt(d.f.linf_xm1 * d.f.l1_x1 * d.g.linf_xm1 * d.g.l1_x1);
  return InequalityReport::make(lhs, rhs, {{"T", d.times.back()}, {"samples", static_cast<double>(d.times.size())}});
}

/// sup_t ‖∫₀ᵗ e^{ν(t−z)Δ}ℙ(f·∇g)‖_{L²} ≤ ‖f‖_{L^∞L²}‖g‖_{L¹X¹}.
inline InequalityReport verify_enq2(const Trajectory& f, const Trajectory& g, double T) {
  const auto d = detail::bilinear_data(f, g, T);
  double lhs = 0.0;
  for (const auto& s : d.duhamel) lhs = std::max(lhs, l2_norm(s));
  const double rhs = d.f.linf_l2 * d.g.l1_x1;
  return InequalityReport::make(lhs, rhs,
                                {{"T", d.times.back()}, {"samples", static_cast<double>(d.times.size())}, {"constant", 1.0}});
}

/// ∫₀^T ‖∫₀ᵗ e^{ν(t−z)Δ}ℙ(f·∇g)‖_{X¹} dt ≤ ν^{-1}(…)^{1/2}, same product as enq1.
inline InequalityReport verify_enq3(const Trajectory& f, const Trajectory& g, double T) {
  const auto d = detail::bilinear_data(f, g, T);
  std::vector<double> x1(d.duhamel.size());
  for (std::size_t i = 0; i < x1.size(); ++i) x1[i] = x_norm(d.duhamel[i], 1.0);
  const double lhs = trapezoid(d.times, x1);
  const double nu = f.params.nu;
  const double rhs = std::sqrt(d.f.linf_xm1 * d.f.l1_x1 * d.g.linf_xm1 * d.g.l1_x1) / nu;
  return InequalityReport::make(lhs, rhs,
                                {{"T", d.times.back()}, {"samples", static_cast<double>(d.times.size())}, {"constant", 1.0 / nu}});
}

struct EnergyReport {
  std::vector<double> times;
  std::vector<double> residual;
  double max_abs_residual = 0.0;
  double initial_energy = 0.0;
};

/// ‖u(t)‖² + 2ν∫₀ᵗ‖∇u‖² − ‖u⁰‖² per sample, from sampled L² and Ḣ¹ norms.
/// With `integrated` set, the last column already holds ∫₀ᵗ‖∇u‖².
inline EnergyReport energy_balance(const std::vector<double>& times, const std::vector<double>& l2,
                                   const std::vector<double>& hdot1, double nu, bool integrated = false) {
  if (times.size() != l2.size() || times.size() != hdot1.size() || times.empty()) {
    throw std::invalid_argument("energy_balance: series length mismatch");
  }
  std::vector<double> integral = hdot1;
  if (!integrated) {
    for (auto& v : integral) v *= v;
    integral = cumulative_trapezoid(times, integral);
  }
  EnergyReport r;
  r.times = times;
  r.initial_energy = l2.front() * l2.front();
  r.residual.resize(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    r.residual[i] = l2[i] * l2[i] + 2.0 * nu * integral[i] - r.initial_energy;
    r.max_abs_residual = std::max(r.max_abs_residual, std::abs(r.residual[i]));
  }
  return r;
}

inline EnergyReport energy_balance(const Trajectory& traj) {
  std::vector<double> l2(traj.size()), h1(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    l2[i] = l2_norm(traj.states[i]);
    h1[i] = hs_dot_norm(traj.states[i], 1.0);
  }
  return energy_balance(traj.times, l2, h1, traj.params.nu);
}

}  // namespace critflow
