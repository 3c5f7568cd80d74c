#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "critflow/duhamel.hpp"
#include "critflow/norms.hpp"
#include "critflow/solver.hpp"
#include "critflow/time_norms.hpp"

namespace critflow {

/// Standing smallness of the L² norm assumed by the contraction argument.
inline constexpr double kStandingL2 = 1.0 / 48.0;

struct RescaledData {
  double lambda = 1.0;
  SpectralVectorField v0;
};

/// v0 = λ u0(λ·) with λ = (4‖u0‖²_{L²}+1)/eps0², realized as L → L/λ with
/// coefficients multiplied by λ. Keeps X^{-1} and divides L² by λ^{1/2}.
inline RescaledData rescale_initial_data(const SpectralVectorField& u0, double eps0) {
  if (!(eps0 > 0.0) || !std::isfinite(eps0)) throw std::invalid_argument("rescale_initial_data: eps0 must be positive");
  if (u0.is_zero()) throw std::invalid_argument("rescale_initial_data: datum must be nonzero");
  const double l2 = l2_norm(u0);
  const double lambda = (4.0 * l2 * l2 + 1.0) / (eps0 * eps0);
  SpectralVectorField v = u0.rebased(u0.grid().with_box_length(u0.grid().box_length() / lambda));
  v *= lambda;
  return {lambda, std::move(v)};
}

struct SplitData {
  double k0 = 0.0;
  int k0_shell = 0;  // |m|² label of the cutoff shell
  SpectralVectorField a0;
  SpectralVectorField b0;
  double tail = 0.0;
};

inline double split_threshold(double nu) { return std::min(nu / 16.0, 1.0 / 16.0); }

/// Σ_{|k|≥k0} |c_k|/|k| for the cutoff shell label (|m|² ≥ label).
inline double tail_above(const SpectralVectorField& u, int shell_label) {
  const Grid& g = u.grid();
  double s = 0.0;
  for (std::size_t i = 1; i < u.size(); ++i) {
    if (g.shell(i) < shell_label) continue;
    const double m = u.magnitude(i);
    if (m != 0.0) s += m / g.kmag(i);
  }
  return s;
}

/// Smallest lattice shell radius k0 with tail < min(ν/16, 1/16); a0 keeps
/// |k| < k0, b0 keeps |k| ≥ k0.
inline SplitData split_initial_data(const SpectralVectorField& u0, double nu) {
  require_viscosity(nu);
  const Grid& g = u0.grid();
  const double bound = split_threshold(nu);
  const auto& shells = g.shells();
  int chosen = -1;
  double tail = 0.0;
  for (int label : shells) {
    if (label == 0) continue;
    const double t = tail_above(u0, label);
    if (t < bound) {
      chosen = label;
      tail = t;
      break;
    }
  }
  if (chosen < 0) {
    const double top = tail_above(u0, shells.back());
    throw std::runtime_error("split_initial_data: tail at the top shell is " + std::to_string(top) +
                             ", not below " + std::to_string(bound));
  }
  SplitData d{g.shell_radius(chosen), chosen, SpectralVectorField(g), SpectralVectorField(g), tail};
  for (std::size_t i = 0; i < u0.size(); ++i) {
    if (g.shell(i) < chosen) {
      d.a0.set(i, u0.at(i));
    } else {
      d.b0.set(i, u0.at(i));
    }
  }
  return d;
}

struct ConditionRecord {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
};

inline void to_json(nlohmann::json& j, const ConditionRecord& r) {
  j = nlohmann::json{{"name", r.name}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"holds", r.holds}};
}

struct ConditionReport {
  double epsilon = 0.0;
  double T = 0.0;
  std::array<ConditionRecord, 9> conditions;
  bool all_hold = false;
  std::vector<std::string> blocking;
  TimeNormStats a_stats;
  double a0_l2 = 0.0;
  double b0_l2 = 0.0;
  double b0_xm1 = 0.0;
  double u0_l2 = 0.0;
  bool standing_l2_holds = true;
};

inline void to_json(nlohmann::json& j, const ConditionReport& r) {
  j = nlohmann::json{{"epsilon", r.epsilon},
                     {"T", r.T},
                     {"conditions", r.conditions},
                     {"all_hold", r.all_hold},
                     {"blocking", r.blocking},
                     {"a_linf_l2", r.a_stats.linf_l2},
                     {"a_linf_xm1", r.a_stats.linf_xm1},
                     {"a_l1_x1", r.a_stats.l1_x1},
                     {"a0_l2", r.a0_l2},
                     {"b0_l2", r.b0_l2},
                     {"b0_xm1", r.b0_xm1},
                     {"u0_l2", r.u0_l2},
                     {"standing_l2_holds", r.standing_l2_holds}};
}

/// ∫₀^T ‖e^{νtΔ}b0‖_{X¹} dt = Σ_k (1 − e^{−νT|k|²}) |c_k|/|k|.
inline double heat_flow_l1_x1(const SpectralVectorField& b0, double nu, double T) {
  const Grid& g = b0.grid();
  double s = 0.0;
  for (std::size_t i = 1; i < b0.size(); ++i) {
    const double m = b0.magnitude(i);
    if (m != 0.0) s += -std::expm1(-nu * T * g.k2(i)) * m / g.kmag(i);
  }
  return s;
}

inline ConditionReport check_conditions(const Trajectory& a_traj, const SpectralVectorField& b0, double eps, double T,
                                        double nu, double u0_l2) {
  require_viscosity(nu);
  if (!(eps > 0.0 && eps < 1.0 / 24.0)) throw std::invalid_argument("check_conditions: epsilon must lie in (0, 1/24)");
  if (!(T > 0.0)) throw std::invalid_argument("check_conditions: T must be positive");
  if (a_traj.size() == 0) throw std::invalid_argument("check_conditions: empty trajectory");
  if (a_traj.grid() != b0.grid()) throw std::invalid_argument("check_conditions: grid mismatch");
  const std::size_t count = samples_through(a_traj.times, T);

  ConditionReport r;
  r.epsilon = eps;
  r.T = T;
  r.a_stats = time_norm_stats(a_traj.times, a_traj.states, count);
  r.a0_l2 = l2_norm(a_traj.states.front());
  r.b0_l2 = l2_norm(b0);
  r.b0_xm1 = x_norm(b0, -1.0);
  r.u0_l2 = u0_l2;
  r.standing_l2_holds = u0_l2 < kStandingL2;

  const double a_inf = r.a_stats.linf_xm1;
  const double a_l1 = r.a_stats.l1_x1;
  const double b_xm1 = r.b0_xm1;
  const double b_l2 = r.b0_l2;
  const double mixed = std::sqrt(a_inf * a_l1) * std::sqrt(2.0 * eps) * std::sqrt(b_xm1);
  const double twelfth = 1.0 / 12.0;

  const std::array<std::pair<double, double>, 9> sides = {{
      {mixed, b_xm1 / 4.0},
      {r.a0_l2 * eps + 2.0 * a_l1 * b_l2, b_l2 / 4.0},
      {mixed / nu, eps / 3.0},
      {eps + 2.0 * b_l2, twelfth},
      {(1.0 + 1.0 / nu) * 2.0 * std::sqrt(2.0 * eps) * std::sqrt(b_xm1), twelfth},
      {heat_flow_l1_x1(b0, nu, T), eps / 3.0},
      {2.0 * std::sqrt(2.0 * eps) * b_xm1, twelfth},
      {a_inf * a_l1, twelfth},
      {a_l1, 1.0 / 24.0},
  }};
  r.all_hold = true;
  for (std::size_t c = 0; c < 9; ++c) {
    auto& rec = r.conditions[c];
    rec.name = "C" + std::to_string(c + 1);
    rec.lhs = sides[c].first;
    rec.rhs = sides[c].second;
    rec.holds = rec.lhs <= rec.rhs;
    // C2 with an empty high part is vacuous.
    if (c == 1 && b0.is_zero()) rec.holds = true;
    if (!rec.holds) {
      r.all_hold = false;
      r.blocking.push_back(rec.name);
    }
  }
  return r;
}

/// ε starts at 1/48 and T halves from the trajectory span until C1–C9 hold;
/// ε is then grown by 5/4 while it stays below 1/24 and the conditions hold.
inline ConditionReport find_epsilon_T(const Trajectory& a_traj, const SpectralVectorField& b0, double nu,
                                      double u0_l2) {
  double eps = 1.0 / 48.0;
  double T = a_traj.times.back();
  const double t_min = a_traj.size() > 1 ? a_traj.times[1] : 0.0;
  ConditionReport last;
  bool found = false;
  while (T >= t_min * (1.0 - 1e-12) && T > 0.0) {
    last = check_conditions(a_traj, b0, eps, T, nu, u0_l2);
    if (last.all_hold) {
      found = true;
      break;
    }
    T *= 0.5;
  }
  if (!found) return last;
  while (eps * 1.25 < 1.0 / 24.0) {
    auto next = check_conditions(a_traj, b0, eps * 1.25, T, nu, u0_l2);
    if (!next.all_hold) break;
    eps *= 1.25;
    last = std::move(next);
  }
  return last;
}

class ContractionError : public std::runtime_error {
 public:
  explicit ContractionError(int iteration)
      : std::runtime_error("picard_iterate: distance grew three times in a row at iteration " +
                           std::to_string(iteration)),
        iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

struct PicardOptions {
  int max_iter = 50;
  double tolerance = 1e-10;
  bool quadratic = true;  // false drops Q(b)
  bool linear = true;     // false drops L(b)
};

struct ContractionReport {
  std::vector<double> iterate_distances;
  double observed_ratio = 0.0;
  bool converged = false;
  int iterations = 0;
  TimeNormStats fixed_point_norms;
  std::vector<bool> in_ball;
  double T = 0.0;
  std::vector<double> times;
  std::vector<SpectralVectorField> fixed_point;
};

inline void to_json(nlohmann::json& j, const ContractionReport& r) {
  j = nlohmann::json{{"iterate_distances", r.iterate_distances},
                     {"observed_ratio", r.observed_ratio},
                     {"converged", r.converged},
                     {"iterations", r.iterations},
                     {"T", r.T},
                     {"in_ball", r.in_ball},
                     {"fixed_point_norms",
                      {{"linf_l2", r.fixed_point_norms.linf_l2},
                       {"linf_xm1", r.fixed_point_norms.linf_xm1},
                       {"l1_x1", r.fixed_point_norms.l1_x1}}}};
}

/// ‖f‖_{ε,T} = ‖f‖_{L^∞L²} + ‖f‖_{L^∞X^{-1}} + ‖f‖_{L¹X¹} on the mesh.
inline double eps_T_norm(const std::vector<double>& times, const std::vector<SpectralVectorField>& states) {
  const auto s = time_norm_stats(times, states, states.size());
  return s.linf_l2 + s.linf_xm1 + s.l1_x1;
}

/// Iterates b ↦ ψ(b) = e^{νtΔ}b0 + L(b) + Q(b) from b ≡ 0 on the mesh of
/// a_traj restricted to [0, T].
inline ContractionReport picard_iterate(const SpectralVectorField& b0, const Trajectory& a_traj, double eps, double T,
                                        double nu, PicardOptions opts = {}) {
  require_viscosity(nu);
  if (opts.max_iter < 1) throw std::invalid_argument("picard_iterate: max_iter must be positive");
  if (a_traj.grid() != b0.grid()) throw std::invalid_argument("picard_iterate: grid mismatch");
  const std::size_t count = samples_through(a_traj.times, T);
  ContractionReport rep;
  rep.times.assign(a_traj.times.begin(), a_traj.times.begin() + static_cast<std::ptrdiff_t>(count));
  rep.T = rep.times.back();

  std::vector<SpectralVectorField> f0, na;
  f0.reserve(count);
  na.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    f0.push_back(heat_semigroup(b0, nu, rep.times[i]));
    na.push_back(nonlinear_term(a_traj.states[i]));
  }
  const double ball_l2 = 2.0 * l2_norm(b0);
  const double ball_xm1 = 2.0 * x_norm(b0, -1.0);
  const double ball_x1 = eps * 1.1;
  const double slack = 1.0 + 1e-12;

  std::vector<SpectralVectorField> b(count, SpectralVectorField(b0.grid()));
  int growth = 0;
  for (int it = 1; it <= opts.max_iter; ++it) {
    std::vector<SpectralVectorField> forcing;
    forcing.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      const auto& a = a_traj.states[i];
      SpectralVectorField f(b0.grid());
      if (opts.linear) {
        f += advection_term(a, b[i]);
        f += advection_term(b[i], a);
      }
      if (opts.quadratic) f += nonlinear_term(b[i]);
      forcing.push_back(std::move(f));
    }
    auto integral = duhamel_accumulate(rep.times, forcing, nu);
    std::vector<SpectralVectorField> next(count, SpectralVectorField(b0.grid()));
    std::vector<SpectralVectorField> diff(count, SpectralVectorField(b0.grid()));
    for (std::size_t i = 0; i < count; ++i) {
      next[i] = f0[i] - integral[i];
      diff[i] = next[i] - b[i];
    }
    const double d = eps_T_norm(rep.times, diff);
    const auto stats = time_norm_stats(rep.times, next, count);
    rep.in_ball.push_back(stats.linf_l2 <= ball_l2 * slack && stats.linf_xm1 <= ball_xm1 * slack &&
                          stats.l1_x1 <= ball_x1 * slack);
    if (!rep.iterate_distances.empty()) {
      const double prev = rep.iterate_distances.back();
      if (prev > 0.0) rep.observed_ratio = std::max(rep.observed_ratio, d / prev);
      growth = d > prev ? growth + 1 : 0;
    }
    rep.iterate_distances.push_back(d);
    b = std::move(next);
    rep.iterations = it;
    if (d < opts.tolerance) {
      rep.converged = true;
      break;
    }
    if (growth >= 3) throw ContractionError(it);
  }
  rep.fixed_point_norms = time_norm_stats(rep.times, b, count);
  rep.fixed_point = std::move(b);
  return rep;
}

/// Compares ‖u0‖_{X^{-1}} with the thresholds ν (global existence) and ν/2.
struct SmallnessRecord {
  double xm1 = 0.0;
  bool global_small = false;
  bool halfnu_small = false;
};

inline SmallnessRecord global_smallness_check(const SpectralVectorField& u0, double nu) {
  require_viscosity(nu);
  const double x = x_norm(u0, -1.0);
  return {x, x < nu, x < 0.5 * nu};
}

inline void to_json(nlohmann::json& j, const SmallnessRecord& r) {
  j = nlohmann::json{{"xm1", r.xm1}, {"global_small", r.global_small}, {"halfnu_small", r.halfnu_small}};
}

/// The full chain: optional rescale, split, low-part solve, condition search,
/// contraction, and a cross-check of a + b against a direct solve at T.
struct WellposedResult {
  double lambda = 1.0;
  bool rescaled = false;
  double k0 = 0.0;
  double tail = 0.0;
  SmallnessRecord smallness;
  ConditionReport conditions;
  ContractionReport contraction;
  bool contraction_attempted = false;
  std::string contraction_error;
  double cross_check_x0 = 0.0;      // ‖(a + b) − u‖_{X⁰} at T
  double cross_check_rel = 0.0;     // same, divided by ‖u(T)‖_{X⁰}
};

inline void to_json(nlohmann::json& j, const WellposedResult& r) {
  j = nlohmann::json{{"lambda", r.lambda},
                     {"rescaled", r.rescaled},
                     {"k0", r.k0},
                     {"tail", r.tail},
                     {"smallness", r.smallness},
                     {"conditions", r.conditions},
                     {"contraction_attempted", r.contraction_attempted},
                     {"cross_check_x0", r.cross_check_x0},
                     {"cross_check_rel", r.cross_check_rel}};
  if (r.contraction_attempted) j["contraction"] = r.contraction;
  if (!r.contraction_error.empty()) j["contraction_error"] = r.contraction_error;
}

inline WellposedResult run_wellposed(const SpectralVectorField& u0, double nu, const StepScheme& scheme, double T_max,
                                     double eps0, PicardOptions opts = {}) {
  WellposedResult out;
  out.smallness = global_smallness_check(u0, nu);
  SpectralVectorField v0 = u0;
  StepScheme vs = scheme;
  double horizon = T_max;
  if (l2_norm(u0) >= kStandingL2) {
    auto r = rescale_initial_data(u0, eps0);
    out.lambda = r.lambda;
    out.rescaled = true;
    v0 = std::move(r.v0);
    // v(t) = λu(λ²t): same step count on the rescaled clock.
    const double clock = r.lambda * r.lambda;
    vs.dt /= clock;
    horizon /= clock;
  }
  const SplitData split = split_initial_data(v0, nu);
  out.k0 = split.k0;
  out.tail = split.tail;
  const double v_l2 = l2_norm(v0);
  const Trajectory a = simulate(split.a0, nu, vs, horizon, vs.dt);
  out.conditions = find_epsilon_T(a, split.b0, nu, v_l2);
  if (!out.conditions.all_hold) return out;
  out.contraction_attempted = true;
  try {
    out.contraction = picard_iterate(split.b0, a, out.conditions.epsilon, out.conditions.T, nu, opts);
  } catch (const ContractionError& e) {
    out.contraction_error = e.what();
    return out;
  }
  const Trajectory u = simulate(v0, nu, vs, out.contraction.T, vs.dt);
  const std::size_t last = out.contraction.fixed_point.size() - 1;
  SpectralVectorField sum = a.states[last] + out.contraction.fixed_point[last];
  const SpectralVectorField diff = sum - u.states.back();
  out.cross_check_x0 = x_norm(diff, 0.0);
  const double ref = x_norm(u.states.back(), 0.0);
  out.cross_check_rel = ref > 0.0 ? out.cross_check_x0 / ref : out.cross_check_x0;
  return out;
}

}  // namespace critflow
