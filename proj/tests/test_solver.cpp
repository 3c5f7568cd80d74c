#include <gtest/gtest.h>

#include "critflow/critflow.hpp"
#include "oracles.hpp"

using namespace critflow;

namespace {

constexpr auto kEtd2 = StepScheme::Kind::etdrk2;
constexpr auto kEuler = StepScheme::Kind::exponential_euler;

SpectralVectorField march(const SpectralVectorField& u0, StepScheme::Kind kind, double dt, double t_end, double nu) {
  SpectralVectorField out = u0;
  integrate(u0, nu, {kind, dt}, t_end, t_end, [&](double, const SpectralVectorField& u) { out = u; });
  return out;
}

double l2_distance(const SpectralVectorField& a, const SpectralVectorField& b) { return l2_norm(a - b); }

}  // namespace

TEST(TimeNorms, QuadratureAndInterpolation) {
  const std::vector<double> t{0.0, 0.5, 1.5, 2.0};
  const std::vector<double> v{1.0, 3.0, -1.0, 2.0};
  EXPECT_DOUBLE_EQ(linf_in_time(v), 3.0);
  EXPECT_DOUBLE_EQ(trapezoid(t, v), 0.25 * 4.0 + 0.5 * 2.0 + 0.25 * 1.0);
  const auto c = cumulative_trapezoid(t, v);
  EXPECT_DOUBLE_EQ(c.back(), trapezoid(t, v));
  EXPECT_DOUBLE_EQ(c[1], 1.0);
  EXPECT_DOUBLE_EQ(interpolate(t, v, 1.0), 1.0);
  EXPECT_THROW(interpolate(t, v, 2.5), std::out_of_range);
  EXPECT_EQ(samples_through(t, 1.5), 3u);
  EXPECT_THROW(samples_through(t, 3.0), std::out_of_range);
}

TEST(Solver, HeatSemigroupLaw) {
  Grid g(8, 5.0);
  const auto u = oracle::random_field(g, 12);
  const auto once = heat_semigroup(heat_semigroup(u, 0.3, 0.2), 0.3, 0.5);
  EXPECT_LT(oracle::rel_diff(once, heat_semigroup(u, 0.3, 0.7)), 1e-15);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u.magnitude2(i) == 0.0) continue;
    EXPECT_NEAR(heat_semigroup(u, 0.3, 0.7).magnitude(i), std::exp(-0.21 * g.k2(i)) * u.magnitude(i), 1e-15);
  }
  EXPECT_THROW(heat_semigroup(u, 1.0, -1.0), std::invalid_argument);
}

TEST(Solver, LinearStepIsExact) {
  Grid g(8, kTwoPi);
  const auto u = oracle::random_field(g, 13);
  const auto s = step(u, {kEtd2, 0.1}, 0.5, false);
  EXPECT_LT(oracle::rel_diff(s, heat_semigroup(u, 0.5, 0.1)), 1e-15);
}

TEST(Solver, PhiFunctionsAreContinuousAcrossSeriesSwitch) {
  for (double z : {-0.0999999, -0.1000001, -3.0}) {
    EXPECT_NEAR(detail::phi2(z), (std::exp(z) - 1.0 - z) / (z * z), 1e-13) << z;
  }
  EXPECT_NEAR(detail::phi2(-1e-8), 0.5 - 1e-8 / 6.0, 1e-16);
  EXPECT_DOUBLE_EQ(detail::phi1(0.0), 1.0);
  EXPECT_DOUBLE_EQ(detail::phi2(0.0), 0.5);
}

TEST(Solver, ShearWaveIsAnExactSolution) {
  Grid g(16, kTwoPi);
  const auto u0 = shear_wave(g, {0, 0, 2}, 0, 0.4);
  const auto u = march(u0, kEtd2, 0.01, 0.5, 0.2);
  EXPECT_LT(oracle::rel_diff(u, heat_semigroup(u0, 0.2, 0.5)), 1e-13);
}

TEST(Solver, ConvergenceOrders) {
  Grid g(16, kTwoPi);
  const auto u0 = oracle::random_field(g, 21, 3.0, 0.05);
  const double nu = 0.05, t_end = 0.4;
  const auto ref = march(u0, kEtd2, 0.4 / 512.0, t_end, nu);
  for (auto [kind, order] : {std::pair{kEtd2, 2.0}, std::pair{kEuler, 1.0}}) {
    const double e1 = l2_distance(march(u0, kind, 0.4 / 16.0, t_end, nu), ref);
    const double e2 = l2_distance(march(u0, kind, 0.4 / 32.0, t_end, nu), ref);
    EXPECT_NEAR(std::log2(e1 / e2), order, 0.15) << to_string(kind);
  }
}

TEST(Solver, StepMatchesDuhamelQuadrature) {
  Grid g(8, kTwoPi);
  const auto u0 = taylor_green(g, 1.0);
  const auto traj = simulate(u0, 1.0, {kEtd2, 1e-3}, 1e-3, 1e-3);
  ASSERT_EQ(traj.size(), 2u);
  auto mild = heat_semigroup(u0, 1.0, 1e-3) - duhamel_oracle(traj, 1e-3, 64);
  EXPECT_LT(oracle::rel_diff(traj.states.back(), mild), 1e-8);
  EXPECT_THROW(duhamel_oracle(traj, 1.0, 64), std::out_of_range);
  EXPECT_THROW(duhamel_oracle(traj, 1e-3, 1), std::invalid_argument);
}

TEST(Solver, SelfConvergenceOfMildForm) {
  Grid g(8, kTwoPi);
  const auto u0 = oracle::random_field(g, 31, 2.0, 0.2);
  const auto traj = simulate(u0, 0.5, {kEtd2, 0.005}, 0.2, 0.005);
  const auto target = traj.states.back();
  double prev = 0.0;
  for (int q : {5, 9, 17, 33}) {
    const auto mild = heat_semigroup(u0, 0.5, 0.2) - duhamel_oracle(traj, 0.2, q);
    const double err = oracle::rel_diff(target, mild);
    if (prev > 0.0) {
      EXPECT_LT(err, prev);
    }
    prev = err;
  }
  EXPECT_LT(prev, 1e-5);
}

TEST(Solver, IntegrateSamplesAndGuards) {
  Grid g(8, kTwoPi);
  const auto u0 = taylor_green(g, 1.0);
  const auto traj = simulate(u0, 1.0, {kEtd2, 0.01}, 0.1, 0.03);
  EXPECT_EQ(traj.times, (std::vector<double>{0.0, 0.03, 0.06, 0.09, 0.1}));
  EXPECT_THROW(simulate(u0, 1.0, {kEtd2, 0.01}, 0.105, 0.01), std::invalid_argument);
  EXPECT_THROW(simulate(u0, 0.0, {kEtd2, 0.01}, 0.1, 0.01), std::invalid_argument);
  EXPECT_THROW(simulate(taylor_green(g, 100.0), 1.0, {kEtd2, 0.01}, 0.1, 0.01), IntegrationError);
  auto bad = u0;
  bad.set(0, Vec3c{1.0, 0.0, 0.0});
  EXPECT_THROW(simulate(bad, 1.0, {kEtd2, 0.01}, 0.1, 0.01), std::invalid_argument);
  EXPECT_EQ(parse_scheme_kind("exponential_euler"), kEuler);
  EXPECT_THROW(parse_scheme_kind("rk4"), std::invalid_argument);
}

TEST(Solver, EnergyBalanceOnTaylorGreen) {
  Grid g(16, kTwoPi);
  const auto u0 = taylor_green(g, 1.0);
  const auto traj = simulate(u0, 0.1, {kEtd2, 1e-3}, 1.0, 1e-3);
  const auto e = energy_balance(traj);
  EXPECT_DOUBLE_EQ(e.initial_energy, l2_norm(u0) * l2_norm(u0));
  EXPECT_LT(e.max_abs_residual, 1e-5 * e.initial_energy);
  const auto lin = simulate(u0, 0.1, {kEtd2, 1e-3}, 0.2, 1e-3, {false, true});
  EXPECT_LT(energy_balance(lin).max_abs_residual, 1e-6 * e.initial_energy);
}

TEST(Duhamel, AccumulateMatchesClosedFormForConstantForcing) {
  Grid g(8, kTwoPi);
  const auto f = oracle::random_field(g, 8);
  const double nu = 0.7;
  std::vector<double> times;
  std::vector<SpectralVectorField> forcing;
  for (int i = 0; i <= 200; ++i) {
    times.push_back(0.005 * i);
    forcing.push_back(f);
  }
  const auto acc = duhamel_accumulate(times, forcing, nu);
  // ∫₀ᵗ e^{-ν(t−z)|k|²} dz = (1 − e^{-νt|k|²})/(ν|k|²).
  const double t = times.back();
  double worst = 0.0;
  for (std::size_t i = 1; i < f.size(); ++i) {
    if (f.magnitude2(i) == 0.0) continue;
    const double a = nu * g.k2(i);
    const double ref = -std::expm1(-a * t) / a * f.magnitude(i);
    worst = std::max(worst, std::abs(acc.back().magnitude(i) - ref) / ref);
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(Duhamel, BilinearEstimatesHold) {
  Grid g(8, kTwoPi);
  const auto f = simulate(oracle::random_field(g, 41, 2.0, 0.1), 1.0, {kEtd2, 0.01}, 0.5, 0.01);
  const auto h = simulate(oracle::random_field(g, 42, 2.5, 0.1), 1.0, {kEtd2, 0.01}, 0.5, 0.01);
  for (const auto& r : {verify_enq1(f, h, 0.5), verify_enq2(f, h, 0.5), verify_enq3(f, h, 0.3)}) {
    EXPECT_TRUE(r.holds) << r.lhs << " > " << r.rhs;
    EXPECT_GT(r.lhs, 0.0);
  }
  const auto other = simulate(oracle::random_field(g, 42, 2.5, 0.1), 2.0, {kEtd2, 0.01}, 0.5, 0.01);
  EXPECT_THROW(verify_enq1(f, other, 0.5), std::invalid_argument);
}
