#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "critflow/initial_data.hpp"
#include "critflow/lemmas.hpp"

namespace critflow {

struct SweepTally {
  std::size_t trials = 0;
  std::size_t holds = 0;
  double worst_relative_margin = std::numeric_limits<double>::infinity();

  void add(const InequalityReport& r) {
    ++trials;
    if (r.holds) ++holds;
    const double scale = std::max(std::abs(r.rhs), 1e-300);
    worst_relative_margin = std::min(worst_relative_margin, r.margin / scale);
  }
  bool all_hold() const { return holds == trials; }
};

inline void to_json(nlohmann::json& j, const SweepTally& t) {
  j = nlohmann::json{{"trials", t.trials}, {"holds", t.holds}, {"all_hold", t.all_hold()},
                     {"worst_relative_margin", t.worst_relative_margin}};
}

struct SweepResult {
  std::map<std::string, SweepTally> tallies;
  std::size_t single_shell_trials = 0;
  double single_shell_max_gap = 0.0;  // max |lhs − rhs|/rhs of check_lem1 on one-shell fields

  bool all_hold() const {
    for (const auto& [k, t] : tallies) {
      if (!t.all_hold()) return false;
    }
    return true;
  }
};

inline void to_json(nlohmann::json& j, const SweepResult& r) {
  j = nlohmann::json{{"tallies", r.tallies},
                     {"single_shell_trials", r.single_shell_trials},
                     {"single_shell_max_gap", r.single_shell_max_gap},
                     {"all_hold", r.all_hold()}};
}

inline const std::vector<std::pair<double, double>>& lem2_pairs() {
  static const std::vector<std::pair<double, double>> p = {{-1.0, 1.0}, {-1.0, 2.0}, {0.0, 2.0}};
  return p;
}

inline const std::vector<std::pair<double, double>>& lem3_pairs() {
  static const std::vector<std::pair<double, double>> p = {{-1.0, 0.0}, {-1.0, 1.0}, {0.0, 1.0}};
  return p;
}

/// Random profile drawn from the trial stream: band, shape, amplitude, jitter.
inline SpectrumProfile random_profile(std::mt19937_64& rng, double r_cap) {
  SpectrumProfile p;
  const double a = 1.0 + detail::unit_uniform(rng) * (r_cap - 1.0);
  const double b = 1.0 + detail::unit_uniform(rng) * (r_cap - 1.0);
  p.r_min = std::min(a, b);
  p.r_max = std::max(std::max(a, b), p.r_min + 1.0);
  p.shape = detail::unit_uniform(rng) < 0.5 ? SpectrumProfile::Shape::plateau : SpectrumProfile::Shape::power_law;
  p.exponent = -3.0 + 4.0 * detail::unit_uniform(rng);
  p.amplitude = std::pow(10.0, -3.0 + 4.0 * detail::unit_uniform(rng));
  p.jitter = 0.9 * detail::unit_uniform(rng);
  p.seed = rng();
  return p;
}

/// Every shell label |m|² realized by at least one retained mode.
inline std::vector<int> retained_shells(const Grid& g) {
  std::vector<int> out;
  for (int label : g.shells()) {
    if (label == 0) continue;
    for (std::size_t i = 1; i < g.size(); ++i) {
      if (g.shell(i) == label && g.is_retained(i) && !g.is_nyquist(i)) {
        out.push_back(label);
        break;
      }
    }
  }
  return out;
}

/// Sweeps check_lem1/2/3 over random fields on an n-grid and product_x0_check
/// over band-limited pairs on an 8-grid. Every tenth trial is a single-shell field.
inline SweepResult run_lemma_sweep(std::size_t trials, std::uint64_t seed, int n = 16) {
  const Grid grid(n, kTwoPi);
  const Grid small(8, kTwoPi);
  const auto shells = retained_shells(grid);
  std::mt19937_64 rng(seed);
  SweepResult out;
  const double r_cap = std::max(1.0, (n - 1) / 3.0);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    SpectrumProfile p = random_profile(rng, r_cap);
    const bool single = trial % 10 == 0;
    if (single) {
      const int label = shells[static_cast<std::size_t>(rng() % shells.size())];
      p.r_min = p.r_max = std::sqrt(static_cast<double>(label));
      p.jitter = 0.0;
    }
    const auto f = random_divfree_field(grid, p);
    const auto r1 = check_lem1(f);
    out.tallies["lem1"].add(r1);
    if (single) {
      ++out.single_shell_trials;
      out.single_shell_max_gap = std::max(out.single_shell_max_gap, std::abs(r1.rhs - r1.lhs) / r1.rhs);
    }
    for (const auto& [sigma, s] : lem2_pairs()) out.tallies["lem2"].add(check_lem2(f, sigma, s));
    for (const auto& [sigma, s0] : lem3_pairs()) out.tallies["lem3"].add(check_lem3(f, sigma, s0));

    SpectrumProfile pf = random_profile(rng, 2.0);
    SpectrumProfile pg = random_profile(rng, 2.0);
    out.tallies["product_x0"].add(product_x0_check(random_divfree_field(small, pf), random_divfree_field(small, pg)));
  }
  return out;
}

}  // namespace critflow
