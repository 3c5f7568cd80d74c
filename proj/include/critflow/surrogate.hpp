#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace critflow {

/// Radially symmetric spectrum |û⁰(ξ)| = ρ(|ξ|) on ℝ³, supported in [0, r_max]
/// (r_max may be +∞).
struct RadialProfile {
  std::function<double(double)> rho;
  double r_max = std::numeric_limits<double>::infinity();
  std::string label;

  static RadialProfile indicator(double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("indicator profile: radius must be positive");
    return {[](double) { return 1.0; }, radius, "indicator:" + std::to_string(radius)};
  }
  static RadialProfile gaussian(double width) {
    if (!(width > 0.0)) throw std::invalid_argument("gaussian profile: width must be positive");
    return {[width](double r) { return std::exp(-(r * r) / (width * width)); },
            std::numeric_limits<double>::infinity(), "gaussian:" + std::to_string(width)};
  }
  /// r^a on [0, R]; integrable against r^1 for a > −2.
  static RadialProfile power(double a, double radius) {
    if (!(a > -2.0)) throw std::invalid_argument("power profile: exponent must exceed -2");
    if (!(radius > 0.0)) throw std::invalid_argument("power profile: radius must be positive");
    return {[a](double r) { return std::pow(r, a); }, radius, "power:" + std::to_string(a) + ":" + std::to_string(radius)};
  }
};

/// Parses "indicator:R", "gaussian:W" or "power:A:R".
inline RadialProfile parse_profile(const std::string& spec) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = spec.find(':', start);
    parts.push_back(spec.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  try {
    if (parts[0] == "indicator" && parts.size() == 2) return RadialProfile::indicator(std::stod(parts[1]));
    if (parts[0] == "gaussian" && parts.size() == 2) return RadialProfile::gaussian(std::stod(parts[1]));
    if (parts[0] == "power" && parts.size() == 3) return RadialProfile::power(std::stod(parts[1]), std::stod(parts[2]));
  } catch (const std::logic_error& e) {
    throw std::invalid_argument("bad profile '" + spec + "': " + e.what());
  }
  throw std::invalid_argument("bad profile '" + spec + "' (expected indicator:R, gaussian:W or power:A:R)");
}

struct SurrogateSample {
  double t = 0.0;
  double xm1 = 0.0;  // 4π ∫ r e^{−νtr²} ρ(r) dr
  double l2 = 0.0;   // ((2π)^{-3} 4π ∫ r² e^{−2νtr²} ρ(r)² dr)^{1/2}
};

namespace detail {
inline double radial_integral(const std::function<double(double)>& f, double r_max) {
  double error = 0.0;
  const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, r_max, 20, 1e-13, &error);
  if (!std::isfinite(v)) throw std::domain_error("continuum_linear_decay: profile is not integrable");
  return v;
}
}  // namespace detail

/// ‖e^{νtΔ}u⁰‖_{X^{-1}} and ‖e^{νtΔ}u⁰‖_{L²} on ℝ³ by adaptive radial quadrature.
inline std::vector<SurrogateSample> continuum_linear_decay(const RadialProfile& p, double nu,
                                                           const std::vector<double>& times) {
  if (!(nu > 0.0)) throw std::invalid_argument("continuum_linear_decay: nu must be positive");
  std::vector<SurrogateSample> out;
  out.reserve(times.size());
  const double four_pi = 4.0 * std::numbers::pi;
  for (double t : times) {
    if (!(t >= 0.0)) throw std::invalid_argument("continuum_linear_decay: times must be nonnegative");
    const double x = detail::radial_integral([&](double r) { return r * std::exp(-nu * t * r * r) * p.rho(r); }, p.r_max);
    const double e = detail::radial_integral(
        [&](double r) {
          const double v = p.rho(r);
          return r * r * std::exp(-2.0 * nu * t * r * r) * v * v;
        },
        p.r_max);
    out.push_back({t, four_pi * x, std::sqrt(four_pi * e) * std::pow(2.0 * std::numbers::pi, -1.5)});
  }
  return out;
}

}  // namespace critflow
