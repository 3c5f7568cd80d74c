#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "critflow/duhamel.hpp"
#include "critflow/lemmas.hpp"
#include "critflow/norms.hpp"
#include "critflow/solver.hpp"
#include "critflow/time_norms.hpp"

namespace critflow {

struct NormSample {
  double t = 0.0;
  double l2 = 0.0;
  std::map<double, double> x;  // σ ↦ ‖u(t)‖_{X^σ}
  double gevrey_xm1 = 0.0;     // radius √(νt/2)
  double hdot1 = 0.0;

  double x_at(double sigma) const {
    const auto it = x.find(sigma);
    if (it == x.end()) throw std::out_of_range("NormSample: sigma " + std::to_string(sigma) + " was not recorded");
    return it->second;
  }
};

/// Per-δ frequency band norms.
struct BandSample {
  double low_l2 = 0.0;   // ‖A_δ u‖_{L²}
  double low_x1 = 0.0;   // ‖A_δ u‖_{X¹}
  double high_l2 = 0.0;  // ‖B_δ u‖_{L²}
};

/// Quantities needed by the verifiers that do not belong in the norm table.
struct AuxSample {
  double t = 0.0;
  double gevrey_full = 0.0;     // ‖e^{√(νt)|D|}u‖_{X^{-1}}
  double gevrey_full_x1 = 0.0;  // ‖e^{√(νt)|D|}u‖_{X¹}
  double split_lambda = 0.0;    // 5√2 ln2 / (4√(νt)); +∞ at t = 0
  double split_low = 0.0;       // Σ_{|k|≤λ} |c|/|k|
  double split_high = 0.0;      // Σ_{|k|>λ} |c|/|k|
  double split_c1 = 0.0;        // (Σ_{0<|k|≤λ}|k|^{-2} / L³)^{1/2}
  double dissipation = 0.0;     // ∫₀ᵗ‖∇u‖², trapezoid over every tracked step
  std::vector<BandSample> bands;
};

struct NormSeries {
  double nu = 1.0;
  std::vector<double> sigmas;
  std::vector<double> deltas;
  std::vector<NormSample> samples;
  std::vector<AuxSample> aux;

  std::size_t size() const { return samples.size(); }
  std::vector<double> times() const {
    std::vector<double> t(samples.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = samples[i].t;
    return t;
  }
  template <class F>
  std::vector<double> column(F&& f) const {
    std::vector<double> v(samples.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(samples[i], aux[i]);
    return v;
  }
  std::size_t delta_index(double delta) const {
    for (std::size_t d = 0; d < deltas.size(); ++d) {
      if (deltas[d] == delta) return d;
    }
    throw std::out_of_range("NormSeries: delta " + std::to_string(delta) + " was not recorded");
  }
};

/// 5√2 ln2 / (4√(νt)), chosen so that e^{−√(νt/2)λ} = 2^{−5/4}.
inline double split_lambda(double nu, double t) {
  if (t <= 0.0) return std::numeric_limits<double>::infinity();
  return 5.0 * std::numbers::sqrt2 * std::numbers::ln2 / (4.0 * std::sqrt(nu * t));
}

/// σ list with −1, 0, 1 added, sorted and deduplicated.
inline std::vector<double> normalize_sigmas(std::vector<double> sigmas) {
  for (double s : {-1.0, 0.0, 1.0}) sigmas.push_back(s);
  for (double s : sigmas) {
    if (!(s > -3.0)) throw std::invalid_argument("sigma must exceed -3, got " + std::to_string(s));
  }
  std::sort(sigmas.begin(), sigmas.end());
  sigmas.erase(std::unique(sigmas.begin(), sigmas.end()), sigmas.end());
  return sigmas;
}

/// Streams samples into a NormSeries; usable as an integrate() observer.
class SeriesRecorder {
 public:
  SeriesRecorder(double nu, std::vector<double> sigmas, std::vector<double> deltas = {}) {
    require_viscosity(nu);
    series_.nu = nu;
    series_.sigmas = normalize_sigmas(std::move(sigmas));
    for (double d : deltas) require_filter({d});
    series_.deltas = std::move(deltas);
  }

  /// Advances the dissipation integral; call at every step when samples are sparse.
  void track(double t, const SpectralVectorField& u) {
    if (last_t_ && t <= *last_t_) return;
    const double d = hs_dot_norm(u, 1.0);
    if (last_t_) dissipation_ += 0.5 * (t - *last_t_) * (d * d + last_d2_);
    last_t_ = t;
    last_d2_ = d * d;
  }

  void operator()(double t, const SpectralVectorField& u) {
    track(t, u);
    const Grid& g = u.grid();
    const double nu = series_.nu;
    NormSample s;
    s.t = t;
    s.l2 = l2_norm(u);
    for (double sigma : series_.sigmas) s.x[sigma] = x_norm(u, sigma);
    s.gevrey_xm1 = gevrey_xm1_norm(u, std::sqrt(nu * t / 2.0));
    s.hdot1 = hs_dot_norm(u, 1.0);

    AuxSample a;
    a.t = t;
    const double r_full = std::sqrt(nu * t);
    a.gevrey_full = gevrey_norm(u, r_full, -1.0);
    a.gevrey_full_x1 = gevrey_norm(u, r_full, 1.0);
    a.split_lambda = split_lambda(nu, t);
    a.split_low = x_norm_below(u, -1.0, a.split_lambda);
    a.split_high = x_norm_above(u, -1.0, a.split_lambda);
    a.split_c1 = std::sqrt(lattice_ball_sum(g, -1.0, a.split_lambda) / g.volume());
    a.dissipation = dissipation_;
    for (double d : series_.deltas) {
      const auto low = low_pass(u, {d});
      const auto high = high_pass(u, {d});
      a.bands.push_back({l2_norm(low), x_norm(low, 1.0), l2_norm(high)});
    }
    series_.samples.push_back(std::move(s));
    series_.aux.push_back(std::move(a));
  }

  const NormSeries& series() const { return series_; }
  NormSeries take() { return std::move(series_); }

 private:
  NormSeries series_;
  std::optional<double> last_t_;
  double last_d2_ = 0.0;
  double dissipation_ = 0.0;
};

inline NormSeries record(const Trajectory& traj, const std::vector<double>& sigmas,
                         const std::vector<double>& deltas = {}) {
  SeriesRecorder rec(traj.params.nu, sigmas, deltas);
  for (std::size_t i = 0; i < traj.size(); ++i) rec(traj.times[i], traj.states[i]);
  return rec.take();
}

inline EnergyReport energy_balance(const NormSeries& s) {
  return energy_balance(s.times(), s.column([](const NormSample& n, const AuxSample&) { return n.l2; }),
                        s.column([](const NormSample&, const AuxSample& a) { return a.dissipation; }), s.nu,
                        true);
}

struct BoundSample {
  double t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = true;
  double margin = 0.0;
  std::map<std::string, double> aux;
};

struct BoundReport {
  std::string name;
  bool applicable = true;
  std::vector<BoundSample> per_sample;
  bool all_hold = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::size_t skipped = 0;
  std::map<std::string, double> params;
  std::map<std::string, std::string> notes;

  void add(double t, double lhs, double rhs, std::map<std::string, double> aux = {}) {
    BoundSample s{t, lhs, rhs, lhs <= rhs * (1.0 + kInequalitySlack), rhs - lhs, std::move(aux)};
    all_hold = all_hold && s.holds;
    worst_margin = std::min(worst_margin, s.margin);
    per_sample.push_back(std::move(s));
  }
};

inline void to_json(nlohmann::json& j, const BoundSample& s) {
  j = nlohmann::json{{"t", s.t}, {"lhs", s.lhs}, {"rhs", s.rhs}, {"holds", s.holds}, {"margin", s.margin}};
  if (!s.aux.empty()) j["aux"] = s.aux;
}

inline void to_json(nlohmann::json& j, const BoundReport& r) {
  j = nlohmann::json{{"name", r.name},
                     {"applicable", r.applicable},
                     {"all_hold", r.all_hold},
                     {"worst_margin", std::isfinite(r.worst_margin) ? nlohmann::json(r.worst_margin) : nlohmann::json()},
                     {"skipped", r.skipped},
                     {"params", r.params},
                     {"notes", r.notes},
                     {"per_sample", r.per_sample}};
}

namespace detail {

/// Value at t/2 by linear interpolation in log-norm (linear when an endpoint
/// vanishes). Returns false when the bracketing interval is wider than 5% of t.
inline bool half_time_lookup(const std::vector<double>& times, const std::vector<double>& values, double t,
                             double& out) {
  const double h = 0.5 * t;
  const auto it = std::lower_bound(times.begin(), times.end(), h);
  if (it == times.end()) return false;
  std::size_t hi = static_cast<std::size_t>(it - times.begin());
  if (times[hi] == h) {
    out = values[hi];
    return true;
  }
  if (hi == 0) return false;
  const std::size_t lo = hi - 1;
  if (times[hi] - times[lo] > 0.05 * t) return false;
  const double w = (h - times[lo]) / (times[hi] - times[lo]);
  if (values[lo] > 0.0 && values[hi] > 0.0) {
    out = std::exp((1.0 - w) * std::log(values[lo]) + w * std::log(values[hi]));
  } else {
    out = (1.0 - w) * values[lo] + w * values[hi];
  }
  return true;
}

inline void require_checked(const BoundReport& r) {
  if (r.per_sample.empty()) throw std::runtime_error(r.name + ": sample cadence too coarse for t/2 lookups");
}

}  // namespace detail

/// ‖u(t)‖_{L²} ≤ ‖u⁰‖_{L²} exp(∫₀ᵗ‖u‖_{X¹}).
inline BoundReport verify_gronwall(const NormSeries& s, double u0_l2) {
  BoundReport r;
  r.name = "gronwall";
  const auto t = s.times();
  const auto x1 = s.column([](const NormSample& n, const AuxSample&) { return n.x_at(1.0); });
  const auto integral = cumulative_trapezoid(t, x1);
  for (std::size_t i = 0; i < s.size(); ++i) r.add(t[i], s.samples[i].l2, u0_l2 * std::exp(integral[i]));
  return r;
}

/// ‖u(t)‖_{X^{-1}} + (ν/2)∫₀ᵗ‖u‖_{X¹} ≤ ‖u⁰‖_{X^{-1}}, applicable when ‖u⁰‖_{X^{-1}} < ν/2.
inline BoundReport verify_eQ2(const NormSeries& s, double u0_xm1, double nu) {
  BoundReport r;
  r.name = "eQ2";
  r.params = {{"u0_xm1", u0_xm1}, {"threshold", 0.5 * nu}};
  if (!(u0_xm1 < 0.5 * nu)) {
    r.applicable = false;
    return r;
  }
  const auto t = s.times();
  const auto x1 = s.column([](const NormSample& n, const AuxSample&) { return n.x_at(1.0); });
  const auto integral = cumulative_trapezoid(t, x1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    r.add(t[i], s.samples[i].x_at(-1.0) + 0.5 * nu * integral[i], u0_xm1, {{"dissipation", 0.5 * nu * integral[i]}});
  }
  return r;
}

/// ‖e^{√(νt)|D|}u(t)‖_{X^{-1}} ≤ 2‖u⁰‖_{X^{-1}}, applicable when ‖u⁰‖_{X^{-1}} < eps0.
/// The accumulated ∫₀ᵗ‖e^{√(νz)|D|}u(z)‖_{X¹} is reported per sample.
inline BoundReport verify_gevrey(const NormSeries& s, double u0_xm1, double nu, double eps0) {
  BoundReport r;
  r.name = "gevrey";
  r.params = {{"u0_xm1", u0_xm1}, {"eps0", eps0}, {"nu", nu}};
  if (!(u0_xm1 < eps0)) {
    r.applicable = false;
    return r;
  }
  const auto t = s.times();
  const auto gx1 = s.column([](const NormSample&, const AuxSample& a) { return a.gevrey_full_x1; });
  const auto integral = cumulative_trapezoid(t, gx1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    r.add(t[i], s.aux[i].gevrey_full, 2.0 * u0_xm1, {{"radius", std::sqrt(nu * t[i])}, {"x1_integral", integral[i]}});
  }
  return r;
}

/// Restart factor of the Gevrey estimate used for J_λ(t) ≤ κ e^{−√(νt/2)λ}‖u(t/2)‖_{X^{-1}}.
inline constexpr double kGevreyRestart = 2.0;

struct SplitReports {
  BoundReport low, high, total;
};

inline void to_json(nlohmann::json& j, const SplitReports& r) {
  j = nlohmann::json{{"I", r.low}, {"J", r.high}, {"total", r.total}};
}

/// ‖u(t)‖_{X^{-1}} = I_λ + J_λ at λ(t) = 5√2 ln2/(4√(νt)):
/// I_λ ≤ c₁(λ)‖u⁰‖_{L²} with the lattice constant, J_λ ≤ κ e^{−√(νt/2)λ}‖u(t/2)‖_{X^{-1}}.
inline SplitReports verify_split_inequality(const NormSeries& s, double u0_l2) {
  SplitReports out;
  out.low.name = "split_I";
  out.high.name = "split_J";
  out.total.name = "split_total";
  const double nu = s.nu;
  const auto t = s.times();
  const auto xm1 = s.column([](const NormSample& n, const AuxSample&) { return n.x_at(-1.0); });
  for (auto* r : {&out.low, &out.high, &out.total}) {
    r->params = {{"restart_factor", kGevreyRestart}, {"u0_l2", u0_l2}};
    r->notes = {{"c1", "lattice sum over 0<|k|<=lambda of |k|^-2, divided by L^3, square root"}};
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (t[i] <= 0.0) continue;
    double half = 0.0;
    if (!detail::half_time_lookup(t, xm1, t[i], half)) {
      for (auto* r : {&out.low, &out.high, &out.total}) ++r->skipped;
      continue;
    }
    const auto& a = s.aux[i];
    const double lambda = a.split_lambda;
    const double factor = std::exp(-std::sqrt(nu * t[i] / 2.0) * lambda);
    const double i_bound = a.split_c1 * u0_l2;
    const double j_bound = kGevreyRestart * factor * half;
    const double continuum_c1 = std::sqrt(4.0 * std::numbers::pi * lambda) * std::pow(kTwoPi, -1.5);
    out.low.add(t[i], a.split_low, i_bound, {{"lambda", lambda}, {"c1", a.split_c1}, {"c1_continuum", continuum_c1}});
    out.high.add(t[i], a.split_high, j_bound,
                 {{"lambda", lambda}, {"factor", factor}, {"gevrey_bound", factor * s.samples[i].gevrey_xm1}});
    out.total.add(t[i], xm1[i], i_bound + j_bound, {{"lambda", lambda}, {"factor", factor}});
  }
  for (auto* r : {&out.low, &out.high, &out.total}) detail::require_checked(*r);
  return out;
}

/// ‖A_δu(t)‖²_{L²} ≤ ‖A_δu⁰‖²_{L²} + m₀∫₀ᵗ‖A_δu‖_{X¹}, m₀ = 2‖u‖²_{L^∞L²}.
inline BoundReport verify_lowpass_bound(const NormSeries& s, double delta) {
  BoundReport r;
  r.name = "lowpass";
  const std::size_t d = s.delta_index(delta);
  const auto t = s.times();
  double linf = 0.0;
  for (const auto& n : s.samples) linf = std::max(linf, n.l2);
  const double m0 = 2.0 * linf * linf;
  const auto low_x1 = s.column([d](const NormSample&, const AuxSample& a) { return a.bands[d].low_x1; });
  const auto integral = cumulative_trapezoid(t, low_x1);
  const double w0 = s.aux.front().bands[d].low_l2;
  r.params = {{"delta", delta}, {"m0", m0}};
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double w = s.aux[i].bands[d].low_l2;
    r.add(t[i], w * w, w0 * w0 + m0 * integral[i]);
  }
  r.params["M_delta_on_span"] = w0 * w0 + m0 * integral.back();
  return r;
}

struct HighpassReport {
  BoundReport pointwise;
  BoundSample integrated;       // ∫₀^T G_δ ≤ (‖u⁰‖_{L²} + m₀‖u‖_{L¹X¹})/(νδ²)
  double tail_fraction = 0.0;   // G_δ(T)/(νδ²) relative to ∫₀^T G_δ
  bool tail_ok = true;
  bool all_hold() const { return pointwise.all_hold && integrated.holds; }
};

inline void to_json(nlohmann::json& j, const HighpassReport& r) {
  j = nlohmann::json{{"pointwise", r.pointwise},
                     {"integrated", r.integrated},
                     {"tail_fraction", r.tail_fraction},
                     {"tail_ok", r.tail_ok},
                     {"all_hold", r.all_hold()}};
}

/// ‖B_δu(t)‖_{L²} ≤ G_δ(t) = e^{−νtδ²}‖u⁰‖_{L²} + m₀∫₀ᵗe^{−ν(t−τ)δ²}‖u(τ)‖_{X¹}dτ,
/// m₀ = ‖u‖_{L^∞L²}, plus the integrated bound on ∫G_δ.
inline HighpassReport verify_highpass_bound(const NormSeries& s, double delta) {
  HighpassReport out;
  auto& r = out.pointwise;
  r.name = "highpass";
  const std::size_t d = s.delta_index(delta);
  const double nu = s.nu;
  const double rate = nu * delta * delta;
  const auto t = s.times();
  double m0 = 0.0;
  for (const auto& n : s.samples) m0 = std::max(m0, n.l2);
  const double u0_l2 = s.samples.front().l2;
  const auto x1 = s.column([](const NormSample& n, const AuxSample&) { return n.x_at(1.0); });
  r.params = {{"delta", delta}, {"m0", m0}};

  std::vector<double> g(s.size());
  double conv = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i > 0) {
      const double h = t[i] - t[i - 1];
      const double e = std::exp(-rate * h);
      conv = e * conv + 0.5 * h * (e * x1[i - 1] + x1[i]);
    }
    g[i] = std::exp(-rate * t[i]) * u0_l2 + m0 * conv;
    r.add(t[i], s.aux[i].bands[d].high_l2, g[i]);
  }

  // Fubini form of ∫₀^T G so both sides share one quadrature of ‖u‖_{X¹}.
  const double T = t.back();
  std::vector<double> weighted(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) weighted[i] = x1[i] * -std::expm1(-rate * (T - t[i]));
  const double lhs = -std::expm1(-rate * T) * u0_l2 / rate + m0 * trapezoid(t, weighted) / rate;
  const double rhs = (u0_l2 + m0 * trapezoid(t, x1)) / rate;
  out.integrated = {T, lhs, rhs, lhs <= rhs * (1.0 + kInequalitySlack), rhs - lhs, {}};
  out.tail_fraction = lhs > 0.0 ? (g.back() / rate) / lhs : 0.0;
  out.tail_ok = out.tail_fraction < 0.05;
  return out;
}

/// Lattice counterpart of the ball constant: sup over shell radii ρ of
/// (Σ_{0<|k|≤ρ}|k|^{2σ} / (L³ ρ^{2σ+3}))^{1/2}, so that the low part of X^σ is
/// at most c₀ λ^{σ+3/2}‖f‖_{L²} for every λ > 0.
inline double lattice_shell_constant(const Grid& g, double sigma) {
  if (!(sigma > -1.5)) throw std::invalid_argument("lattice_shell_constant: sigma must exceed -3/2");
  std::vector<std::pair<double, double>> weights;  // (|k|, |k|^{2σ})
  for (std::size_t i = 1; i < g.size(); ++i) weights.emplace_back(g.kmag(i), std::pow(g.k2(i), sigma));
  std::sort(weights.begin(), weights.end());
  double best = 0.0, acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i].second;
    if (i + 1 < weights.size() && weights[i + 1].first == weights[i].first) continue;
    best = std::max(best, acc / (g.volume() * std::pow(weights[i].first, 2.0 * sigma + 3.0)));
  }
  return std::sqrt(best);
}

/// ‖u‖_{X^σ} ≤ c'_σ A^{−2σ−2} B^{3+2σ}, A = c₀‖u‖_{L²}, B = ‖u‖_{X^{-1}}, −3/2 < σ < −1.
inline BoundSample verify_sigma_decay_case1(const NormSample& n, double sigma, double c0) {
  if (!(sigma > -1.5 && sigma < -1.0)) throw std::invalid_argument("case 1 requires -3/2 < sigma < -1");
  const double lhs = n.x_at(sigma);
  const double A = c0 * n.l2;
  const double B = n.x_at(-1.0);
  if (A == 0.0 || B == 0.0) return {n.t, lhs, 0.0, lhs <= 0.0, -lhs, {{"sigma", sigma}}};
  const double kappa = -(1.0 + sigma) / (sigma + 1.5);
  const double cprime = std::pow(kappa, 2.0 * sigma + 3.0) + std::pow(kappa, 2.0 * sigma + 2.0);
  const double lambda0 = std::pow(kappa * B / A, 2.0);
  const double rhs = cprime * std::pow(A, -2.0 * sigma - 2.0) * std::pow(B, 3.0 + 2.0 * sigma);
  return {n.t,
          lhs,
          rhs,
          lhs <= rhs * (1.0 + kInequalitySlack),
          rhs - lhs,
          {{"sigma", sigma}, {"A", A}, {"B", B}, {"lambda0", lambda0}, {"c_prime", cprime}, {"c0", c0}}};
}

inline BoundReport verify_sigma_decay_case1(const NormSeries& s, double sigma, double c0) {
  BoundReport r;
  r.name = "sigma_case1";
  r.params = {{"sigma", sigma},
              {"c0", c0},
              {"c0_continuum", std::sqrt(4.0 * std::numbers::pi / (2.0 * sigma + 3.0)) * std::pow(kTwoPi, -1.5)}};
  for (const auto& n : s.samples) {
    auto b = verify_sigma_decay_case1(n, sigma, c0);
    r.add(b.t, b.lhs, b.rhs, std::move(b.aux));
  }
  return r;
}

/// ν^{-(σ+1)/2} sup_{z≥0} z^{σ+1}e^{−z} = ν^{-(σ+1)/2}((σ+1)/e)^{σ+1}.
inline double case2_constant(double sigma, double nu) {
  if (!(sigma > -1.0)) throw std::invalid_argument("case 2 requires sigma > -1");
  const double p = sigma + 1.0;
  return std::pow(nu, -p / 2.0) * std::pow(p / std::numbers::e, p);
}

/// ‖u(t)‖_{X^σ} ≤ 2C_ν t^{−(σ+1)/2}‖u(t/2)‖_{X^{-1}}, σ > −1.
inline BoundReport verify_sigma_decay_case2(const NormSeries& s, double sigma) {
  BoundReport r;
  r.name = "sigma_case2";
  const double nu = s.nu;
  const double c = case2_constant(sigma, nu);
  r.params = {{"sigma", sigma}, {"C_nu", c}, {"r", 1.0}};
  const auto t = s.times();
  const auto xm1 = s.column([](const NormSample& n, const AuxSample&) { return n.x_at(-1.0); });
  const double p = sigma + 1.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (t[i] <= 0.0) continue;
    double half = 0.0;
    if (!detail::half_time_lookup(t, xm1, t[i], half)) {
      ++r.skipped;
      continue;
    }
    const double lhs = s.samples[i].x_at(sigma);
    // Radius √(νt/2) version of the same estimate, for comparison.
    const double gevrey_form = std::pow(std::sqrt(nu * t[i] / 2.0), -p) * std::pow(p / std::numbers::e, p) *
                               s.samples[i].gevrey_xm1;
    r.add(t[i], lhs, 2.0 * c * std::pow(t[i], -p / 2.0) * half, {{"gevrey_form", gevrey_form}});
  }
  detail::require_checked(r);
  return r;
}

struct BootstrapSpec {
  double M0 = 0.0;
  double theta1 = 0.5;
  double theta2 = 0.5;
};

struct BootstrapResult {
  bool hypothesis_holds = false;
  double sup_f = 0.0;
  double bound = 0.0;
  bool conclusion_holds = false;
  double worst_hypothesis_t = 0.0;  // sample where f − M0 − θ₁f(θ₂t) is largest
  double worst_hypothesis_excess = 0.0;
};

inline void to_json(nlohmann::json& j, const BootstrapResult& r) {
  j = nlohmann::json{{"hypothesis_holds", r.hypothesis_holds},   {"sup_f", r.sup_f},
                     {"bound", r.bound},                         {"conclusion_holds", r.conclusion_holds},
                     {"worst_hypothesis_t", r.worst_hypothesis_t}, {"worst_hypothesis_excess", r.worst_hypothesis_excess}};
}

/// Tolerance on the conclusion for sampled data.
inline constexpr double kBootstrapTolerance = 1e-3;

/// Checks f(t) ≤ M0 + θ₁f(θ₂t) on the samples (f(θ₂t) by linear interpolation),
/// then sup f ≤ M0/(1−θ₁).
inline BootstrapResult bootstrap_bound(const std::vector<double>& times, const std::vector<double>& f,
                                       const BootstrapSpec& spec) {
  if (times.size() != f.size() || times.empty()) throw std::invalid_argument("bootstrap_bound: size mismatch");
  if (!(spec.M0 >= 0.0)) throw std::invalid_argument("bootstrap_bound: M0 must be nonnegative");
  if (!(spec.theta1 > 0.0 && spec.theta1 < 1.0 && spec.theta2 > 0.0 && spec.theta2 < 1.0)) {
    throw std::invalid_argument("bootstrap_bound: theta1 and theta2 must lie in (0, 1)");
  }
  for (double v : f) {
    if (v < 0.0) throw std::invalid_argument("bootstrap_bound: f must be nonnegative");
  }
  BootstrapResult r;
  r.hypothesis_holds = true;
  r.worst_hypothesis_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double inner = interpolate(times, f, spec.theta2 * times[i]);
    const double rhs = spec.M0 + spec.theta1 * inner;
    const double excess = f[i] - rhs;
    if (excess > r.worst_hypothesis_excess) {
      r.worst_hypothesis_excess = excess;
      r.worst_hypothesis_t = times[i];
    }
    if (f[i] > rhs * (1.0 + kInequalitySlack)) r.hypothesis_holds = false;
    r.sup_f = std::max(r.sup_f, f[i]);
  }
  r.bound = spec.M0 / (1.0 - spec.theta1);
  r.conclusion_holds = r.hypothesis_holds && r.sup_f <= r.bound * (1.0 + kBootstrapTolerance);
  return r;
}

struct DecayFit {
  double sigma = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double reference_slope = 0.0;  // −(σ+3/2)/2
  std::size_t samples = 0;
};

inline void to_json(nlohmann::json& j, const DecayFit& f) {
  j = nlohmann::json{{"sigma", f.sigma},         {"window", {f.t_lo, f.t_hi}}, {"slope", f.slope},
                     {"intercept", f.intercept}, {"r_squared", f.r_squared},   {"reference_slope", f.reference_slope},
                     {"samples", f.samples}};
}

/// Least squares of log v against log t over samples with t ∈ [t_lo, t_hi].
inline DecayFit fit_power_law(const std::vector<double>& times, const std::vector<double>& values, double t_lo,
                              double t_hi) {
  if (times.size() != values.size()) throw std::invalid_argument("fit_decay_slope: size mismatch");
  if (!(t_lo > 0.0 && t_hi > t_lo)) throw std::invalid_argument("fit_decay_slope: window must satisfy 0 < t_lo < t_hi");
  if (times.empty() || t_lo < times.front() || t_hi > times.back() * (1.0 + 1e-12)) {
    throw std::out_of_range("fit_decay_slope: window outside series span");
  }
  std::vector<double> x, y;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_lo || times[i] > t_hi) continue;
    if (!(values[i] > 0.0)) throw std::invalid_argument("fit_decay_slope: nonpositive value in window");
    x.push_back(std::log(times[i]));
    y.push_back(std::log(values[i]));
  }
  if (x.size() < 5) throw std::invalid_argument("fit_decay_slope: window needs at least 5 samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  DecayFit f;
  f.t_lo = t_lo;
  f.t_hi = t_hi;
  f.samples = x.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - (f.intercept + f.slope * x[i]);
    ss_res += e * e;
  }
  f.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return f;
}

inline double reference_decay_slope(double sigma) { return -(sigma + 1.5) / 2.0; }

inline DecayFit fit_decay_slope(const NormSeries& s, double sigma, double t_lo, double t_hi) {
  const auto v = s.column([sigma](const NormSample& n, const AuxSample&) { return n.x_at(sigma); });
  auto f = fit_power_law(s.times(), v, t_lo, t_hi);
  f.sigma = sigma;
  f.reference_slope = reference_decay_slope(sigma);
  return f;
}

struct LimsupProbe {
  double M0 = 0.0;
  double onset = 0.0;          // first sample time after which t^{1/4}‖u‖_{X^{-1}} ≤ 2M₀ throughout
  bool found = false;
  double worst_excess = 0.0;   // max of t^{1/4}‖u‖_{X^{-1}} − 2M₀ over all samples
};

inline void to_json(nlohmann::json& j, const LimsupProbe& p) {
  j = nlohmann::json{{"M0", p.M0}, {"onset", p.onset}, {"found", p.found}, {"worst_excess", p.worst_excess}};
}

/// t^{1/4}‖u(t)‖_{X^{-1}} against 2M₀, M₀ = c₀(5√2 ln2/(4√ν))^{1/2}‖u⁰‖_{L²}.
inline LimsupProbe limsup_probe(const NormSeries& s, double c0, double u0_l2) {
  LimsupProbe p;
  p.M0 = c0 * std::sqrt(5.0 * std::numbers::sqrt2 * std::numbers::ln2 / (4.0 * std::sqrt(s.nu))) * u0_l2;
  p.worst_excess = -std::numeric_limits<double>::infinity();
  std::size_t last_bad = s.size();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double e = std::pow(s.samples[i].t, 0.25) * s.samples[i].x_at(-1.0) - 2.0 * p.M0;
    p.worst_excess = std::max(p.worst_excess, e);
    if (e > 0.0) last_bad = i;
  }
  if (last_bad == s.size()) {
    p.found = true;
    p.onset = s.samples.front().t;
  } else if (last_bad + 1 < s.size()) {
    p.found = true;
    p.onset = s.samples[last_bad + 1].t;
  }
  return p;
}

}  // namespace critflow
