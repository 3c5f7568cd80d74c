#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace critflow {

// Mixed space-time norms on a sample mesh: L^∞_T by the maximum over samples,
// L¹_T by the trapezoid rule.

inline double linf_in_time(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, v);
  return m;
}

inline double trapezoid(std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size()) throw std::invalid_argument("trapezoid: size mismatch");
  double s = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) s += 0.5 * (times[i] - times[i - 1]) * (values[i] + values[i - 1]);
  return s;
}

/// Running trapezoid integral ∫₀^{t_i} v, one entry per sample.
inline std::vector<double> cumulative_trapezoid(std::span<const double> times, std::span<const double> values) {
  if (times.size() != values.size()) throw std::invalid_argument("cumulative_trapezoid: size mismatch");
  std::vector<double> out(times.size(), 0.0);
  for (std::size_t i = 1; i < times.size(); ++i) {
    out[i] = out[i - 1] + 0.5 * (times[i] - times[i - 1]) * (values[i] + values[i - 1]);
  }
  return out;
}

/// Linear interpolation of a sampled function; t must lie within the mesh.
inline double interpolate(std::span<const double> times, std::span<const double> values, double t) {
  if (times.empty()) throw std::invalid_argument("interpolate: empty series");
  const double tol = 1e-12 * std::max(1.0, std::abs(times.back()));
  if (t < times.front() - tol || t > times.back() + tol) throw std::out_of_range("interpolate: time outside series span");
  if (t <= times.front()) return values.front();
  if (t >= times.back()) return values.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - times.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - times[lo]) / (times[hi] - times[lo]);
  return (1.0 - w) * values[lo] + w * values[hi];
}

/// Number of leading samples with t ≤ T (T must not exceed the span).
inline std::size_t samples_through(std::span<const double> times, double T) {
  if (times.empty()) throw std::invalid_argument("samples_through: empty series");
  const double tol = 1e-12 * std::max(1.0, std::abs(T));
  if (T > times.back() + tol) throw std::out_of_range("samples_through: T beyond series span");
  std::size_t count = 0;
  while (count < times.size() && times[count] <= T + tol) ++count;
  return count;
}

}  // namespace critflow
