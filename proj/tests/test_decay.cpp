#include <gtest/gtest.h>

#include "critflow/critflow.hpp"
#include "oracles.hpp"

using namespace critflow;

namespace {

constexpr StepScheme kScheme{StepScheme::Kind::etdrk2, 0.01};

// 2a cos(x₁)e₂ on the 2π box: x[−1](t) = 2a e^{−νt} exactly.
NormSeries single_shell_series(double a, double nu, double t_end, std::vector<double> deltas = {}) {
  Grid g(8, kTwoPi);
  const auto traj = simulate(shear_wave(g, {1, 0, 0}, 1, a), nu, kScheme, t_end, kScheme.dt);
  return record(traj, {-1.25}, std::move(deltas));
}

NormSeries small_tg_series() {
  Grid g(16, kTwoPi);
  auto u0 = taylor_green(g, 1.0);
  u0 *= 0.3 / x_norm(u0, -1.0);
  const auto traj = simulate(u0, 1.0, kScheme, 2.0, kScheme.dt);
  return record(traj, {-1.25}, {1.5});
}

}  // namespace

TEST(Series, RecordsSingleShellClosedForm) {
  const auto s = single_shell_series(0.2, 1.0, 1.0);
  EXPECT_EQ(s.sigmas, (std::vector<double>{-1.25, -1.0, 0.0, 1.0}));
  for (const auto& n : s.samples) {
    EXPECT_NEAR(n.x_at(-1.0), 0.4 * std::exp(-n.t), 1e-14);
    EXPECT_NEAR(n.gevrey_xm1, std::exp(std::sqrt(n.t / 2.0)) * 0.4 * std::exp(-n.t), 1e-14);
    EXPECT_LE(n.x_at(0.0), std::sqrt(n.x_at(-1.0) * n.x_at(1.0)) * (1.0 + 1e-15));
  }
  EXPECT_TRUE(std::isinf(s.aux.front().split_lambda));
  EXPECT_THROW(s.samples.front().x_at(0.5), std::out_of_range);
  EXPECT_THROW(normalize_sigmas({-3.5}), std::invalid_argument);
  EXPECT_EQ(normalize_sigmas({1.0, -1.25, 0.0}), (std::vector<double>{-1.25, -1.0, 0.0, 1.0}));
}

TEST(Series, ZeroTrajectoryRecordsZeros) {
  Grid g(8, kTwoPi);
  const auto s = record(simulate(SpectralVectorField(g), 1.0, kScheme, 0.1, kScheme.dt), {});
  for (const auto& n : s.samples) {
    EXPECT_EQ(n.l2, 0.0);
    EXPECT_EQ(n.x_at(-1.0), 0.0);
  }
  EXPECT_TRUE(verify_gronwall(s, 0.0).all_hold);
  EXPECT_EQ(energy_balance(s).max_abs_residual, 0.0);
}

TEST(Bounds, Eq2SingleShellClosedForm) {
  const double a = 0.2;
  const auto s = single_shell_series(a, 1.0, 2.0);
  const auto r = verify_eQ2(s, 2.0 * a, 1.0);
  ASSERT_TRUE(r.applicable);
  EXPECT_TRUE(r.all_hold);
  for (const auto& b : r.per_sample) {
    // 2a e^{−t} + a(1 − e^{−t}); the trapezoid of e^{−t} overestimates by O(dt²).
    EXPECT_NEAR(b.lhs, 2.0 * a * std::exp(-b.t) + a * (1.0 - std::exp(-b.t)), 1e-5);
  }
  EXPECT_DOUBLE_EQ(r.per_sample.front().margin, 0.0);
  EXPECT_FALSE(verify_eQ2(s, 0.6, 1.0).applicable);
}

TEST(Bounds, GevreySingleShellClosedForm) {
  const double a = 0.1;
  const auto s = single_shell_series(a, 1.0, 3.0);
  const auto r = verify_gevrey(s, 2.0 * a, 1.0, 0.25);
  ASSERT_TRUE(r.applicable);
  EXPECT_TRUE(r.all_hold);
  double worst = 0.0;
  for (const auto& b : r.per_sample) {
    EXPECT_NEAR(b.lhs, std::exp(std::sqrt(b.t) - b.t) * 2.0 * a, 1e-14);
    worst = std::max(worst, b.lhs / (2.0 * a));
  }
  EXPECT_NEAR(worst, std::exp(0.25), 1e-4);
  EXPECT_FALSE(verify_gevrey(s, 0.3, 1.0, 0.25).applicable);
}

TEST(Bounds, SplitConstants) {
  EXPECT_NEAR(split_lambda(1.0, 2.0), 5.0 * std::numbers::ln2 / 4.0, 1e-15);
  for (double nu : {0.1, 1.0, 3.0}) {
    for (double t : {0.01, 1.0, 100.0}) {
      EXPECT_NEAR(std::exp(-std::sqrt(nu * t / 2.0) * split_lambda(nu, t)), std::pow(2.0, -1.25), 1e-12);
    }
  }
  EXPECT_NEAR(case2_constant(0.0, 1.0), 1.0 / std::numbers::e, 1e-12);
  EXPECT_NEAR(case2_constant(-1.0 + 1e-9, 1.0), 1.0, 1e-7);
  EXPECT_NEAR(case2_constant(1.0, 4.0), 0.25 * std::pow(2.0 / std::numbers::e, 2.0), 1e-15);
  EXPECT_THROW(case2_constant(-1.0, 1.0), std::invalid_argument);
  EXPECT_DOUBLE_EQ(reference_decay_slope(-1.0), -0.25);
  EXPECT_DOUBLE_EQ(reference_decay_slope(0.0), -0.75);
  EXPECT_DOUBLE_EQ(reference_decay_slope(1.0), -1.25);
}

TEST(Bounds, LatticeShellConstantBoundsLowPart) {
  Grid g(16, kTwoPi);
  for (double sigma : {-1.25, -1.0, 0.0}) {
    const double c0 = lattice_shell_constant(g, sigma);
    for (std::uint64_t s = 0; s < 5; ++s) {
      const auto f = oracle::random_field(g, 500 + s, 5.0);
      for (double lambda : {1.0, 1.7, 2.5, 4.0}) {
        EXPECT_LE(x_norm_below(f, sigma, lambda), c0 * std::pow(lambda, sigma + 1.5) * l2_norm(f) * (1.0 + 1e-12));
      }
    }
  }
  // Shell |k| = 1 alone: 6 modes, so c0² ≥ 6/(2π)³.
  EXPECT_GE(lattice_shell_constant(g, -1.0), std::sqrt(6.0 / g.volume()));
}

TEST(Bounds, Case1SingleShell) {
  const auto s = single_shell_series(0.3, 1.0, 0.1);
  const double c0 = lattice_shell_constant(Grid(8, kTwoPi), -1.25);
  const auto& n = s.samples.front();
  const auto b = verify_sigma_decay_case1(n, -1.25, c0);
  EXPECT_DOUBLE_EQ(b.lhs, n.x_at(-1.0));
  const double A = c0 * n.l2, B = n.x_at(-1.0);
  const double cp = std::pow(1.0, 0.5) + std::pow(1.0, -0.5);  // κ = 1 at σ = −5/4
  EXPECT_NEAR(b.rhs, cp * std::pow(A, 0.5) * std::pow(B, 0.5), 1e-14);
  EXPECT_THROW(verify_sigma_decay_case1(n, -1.0, c0), std::invalid_argument);
}

TEST(Bounds, FilterEdgeCasesHoldTrivially) {
  const auto s = single_shell_series(0.2, 1.0, 0.5, {0.5, 10.0});
  const auto low = verify_lowpass_bound(s, 0.5);
  EXPECT_TRUE(low.all_hold);
  for (const auto& b : low.per_sample) EXPECT_EQ(b.lhs, 0.0);
  const auto high = verify_highpass_bound(s, 10.0);
  EXPECT_TRUE(high.all_hold());
  for (const auto& b : high.pointwise.per_sample) EXPECT_EQ(b.lhs, 0.0);
  EXPECT_THROW(verify_lowpass_bound(s, 1.5), std::out_of_range);
}

TEST(Bounds, SmallTaylorGreenRunSatisfiesEveryBound) {
  const auto s = small_tg_series();
  const double u0_l2 = s.samples.front().l2;
  const double u0_xm1 = s.samples.front().x_at(-1.0);
  EXPECT_NEAR(u0_xm1, 0.3, 1e-15);
  EXPECT_TRUE(verify_gronwall(s, u0_l2).all_hold);
  EXPECT_TRUE(verify_eQ2(s, u0_xm1, 1.0).all_hold);
  EXPECT_TRUE(verify_gevrey(s, u0_xm1, 1.0, 0.5).all_hold);
  const auto split = verify_split_inequality(s, u0_l2);
  EXPECT_TRUE(split.low.all_hold);
  EXPECT_TRUE(split.high.all_hold);
  EXPECT_TRUE(split.total.all_hold);
  EXPECT_GT(split.total.skipped, 0u);
  EXPECT_TRUE(verify_lowpass_bound(s, 1.5).all_hold);
  EXPECT_TRUE(verify_highpass_bound(s, 1.5).all_hold());
  EXPECT_TRUE(verify_sigma_decay_case2(s, 0.0).all_hold);
  EXPECT_TRUE(verify_sigma_decay_case2(s, 1.0).all_hold);
  EXPECT_TRUE(verify_sigma_decay_case1(s, -1.25, lattice_shell_constant(Grid(16, kTwoPi), -1.25)).all_hold);
  const auto probe = limsup_probe(s, lattice_shell_constant(Grid(16, kTwoPi), -1.0), u0_l2);
  EXPECT_TRUE(probe.found);
}

TEST(Bootstrap, DocumentedExamples) {
  std::vector<double> t, one, decay, two;
  for (int i = 0; i <= 400; ++i) {
    t.push_back(0.025 * i);
    one.push_back(1.0);
    decay.push_back(std::exp(-t.back()));
    two.push_back(2.0);
  }
  const BootstrapSpec spec{0.5, 0.5, 0.5};
  const auto a = bootstrap_bound(t, one, spec);
  EXPECT_TRUE(a.hypothesis_holds);
  EXPECT_DOUBLE_EQ(a.bound, 1.0);
  EXPECT_TRUE(a.conclusion_holds);
  const auto b = bootstrap_bound(t, decay, spec);
  EXPECT_TRUE(b.hypothesis_holds);
  EXPECT_DOUBLE_EQ(b.sup_f, 1.0);
  EXPECT_TRUE(b.conclusion_holds);
  const auto c = bootstrap_bound(t, two, spec);
  EXPECT_FALSE(c.hypothesis_holds);
  EXPECT_FALSE(c.conclusion_holds);
  EXPECT_THROW(bootstrap_bound(t, one, {0.5, 1.0, 0.5}), std::invalid_argument);
}

TEST(Fit, RecoversExactPowerLaws) {
  std::vector<double> t;
  for (int i = 1; i <= 200; ++i) t.push_back(0.05 * i);
  for (double p : {-0.25, -0.75, -1.25}) {
    std::vector<double> v;
    for (double x : t) v.push_back(3.0 * std::pow(x, p));
    const auto f = fit_power_law(t, v, 1.0, 10.0);
    EXPECT_NEAR(f.slope, p, 1e-10);
    EXPECT_NEAR(f.intercept, std::log(3.0), 1e-10);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  }
  EXPECT_THROW(fit_power_law(t, t, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(fit_power_law(t, t, 1.0, 20.0), std::out_of_range);
  EXPECT_THROW(fit_power_law(t, t, 1.0, 1.1), std::invalid_argument);
}

TEST(Fit, ExponentialDecayFitsSteeperThanReference) {
  const auto s = single_shell_series(0.2, 1.0, 4.0);
  const auto f = fit_decay_slope(s, -1.0, 2.0, 4.0);
  EXPECT_LT(f.slope, -1.0);
  EXPECT_DOUBLE_EQ(f.reference_slope, -0.25);
}

TEST(Surrogate, IndicatorClosedForm) {
  std::vector<double> times;
  for (double t = 0.01; t <= 100.0; t *= 1.5) times.push_back(t);
  const auto rows = continuum_linear_decay(RadialProfile::indicator(1.0), 1.0, times);
  for (const auto& r : rows) {
    const double ref = 2.0 * std::numbers::pi * -std::expm1(-r.t) / r.t;
    EXPECT_NEAR(r.xm1 / ref, 1.0, 1e-8) << r.t;
  }
  const auto zero = continuum_linear_decay(RadialProfile::indicator(1.0), 1.0, {0.0});
  EXPECT_NEAR(zero.front().xm1, 2.0 * std::numbers::pi, 1e-12);
  // ∫₀¹ r² dr = 1/3: ‖u⁰‖_{L²} = ((2π)^{-3} 4π/3)^{1/2}.
  EXPECT_NEAR(zero.front().l2, std::sqrt(4.0 * std::numbers::pi / 3.0) * std::pow(kTwoPi, -1.5), 1e-12);
}

TEST(Surrogate, GaussianAndParsing) {
  // ∫₀^∞ r e^{−(t+1/w²)r²} dr = 1/(2(t + 1/w²)).
  const auto rows = continuum_linear_decay(parse_profile("gaussian:2"), 0.5, {0.0, 1.0, 10.0});
  for (const auto& r : rows) EXPECT_NEAR(r.xm1, 4.0 * std::numbers::pi / (2.0 * (0.5 * r.t + 0.25)), 1e-9);
  EXPECT_NO_THROW(parse_profile("power:-1:3"));
  EXPECT_THROW(parse_profile("power:-3:1"), std::invalid_argument);
  EXPECT_THROW(parse_profile("box:1"), std::invalid_argument);
  EXPECT_THROW(parse_profile("indicator:x"), std::invalid_argument);
  EXPECT_THROW(continuum_linear_decay(RadialProfile::indicator(1.0), 0.0, {1.0}), std::invalid_argument);
}

TEST(Recorder, TrackedDissipationMatchesDenseTrapezoid) {
  Grid g(8, kTwoPi);
  const auto traj = simulate(oracle::random_field(g, 77, 2.0, 0.1), 0.5, {StepScheme::Kind::etdrk2, 0.01}, 0.4, 0.01);
  SeriesRecorder rec(0.5, {});
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (i % 10 == 0) {
      rec(traj.times[i], traj.states[i]);
    } else {
      rec.track(traj.times[i], traj.states[i]);
    }
  }
  const auto sparse = rec.take();
  ASSERT_EQ(sparse.size(), 5u);
  std::vector<double> d2;
  for (const auto& u : traj.states) d2.push_back(std::pow(hs_dot_norm(u, 1.0), 2));
  const auto dense = cumulative_trapezoid(traj.times, d2);
  for (std::size_t j = 0; j < sparse.size(); ++j) EXPECT_NEAR(sparse.aux[j].dissipation, dense[10 * j], 1e-12 * dense.back());
  EXPECT_NEAR(energy_balance(sparse).max_abs_residual, 0.0, 10.0 * 1e-4 * sparse.samples[0].l2 * sparse.samples[0].l2);
}
