#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "critflow/grid.hpp"
#include "critflow/initial_data.hpp"
#include "critflow/solver.hpp"

namespace critflow {

inline constexpr int kConfigFormatVersion = 1;

/// Raised for malformed or out-of-range configuration; `field` is the dotted key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error("config: " + field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

inline const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names = {"energy", "lemma1",   "gronwall", "eQ2",   "gevrey",
                                                 "split",  "lowpass",  "highpass", "case1", "case2"};
  return names;
}

struct InitialDataConfig {
  enum class Kind { taylor_green, random, file };
  Kind kind = Kind::taylor_green;
  double amplitude = 1.0;
  SpectrumProfile profile;
  std::string path;
  // Optional rescaling to a target norm value.
  std::string scale_norm;  // "", "xm1" or "l2"
  double scale_value = 0.0;
};

struct RunConfig {
  int format_version = kConfigFormatVersion;
  int n = 32;
  double L = kTwoPi;
  double nu = 1.0;
  StepScheme scheme{StepScheme::Kind::etdrk2, 1e-3};
  double t_end = 1.0;
  double sample_every = 1e-3;
  std::uint64_t seed = 0;
  std::string output_dir = "critflow_out";
  bool save_snapshots = false;
  InitialDataConfig initial;
  std::vector<double> sigmas;
  std::vector<double> deltas;
  std::vector<std::string> checks;
  std::optional<double> eps0;  // default ν/4
  std::optional<std::pair<double, double>> fit_window;
  double wellposed_T_max = 0.25;

  double eps0_value() const { return eps0 ? *eps0 : nu / 4.0; }
};

namespace detail {

inline void reject_unknown(const YAML::Node& node, const std::string& section, std::initializer_list<const char*> keys) {
  if (!node) return;
  if (!node.IsMap()) throw ConfigError(section.empty() ? "<root>" : section, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (std::find_if(keys.begin(), keys.end(), [&](const char* k) { return key == k; }) == keys.end()) {
      throw ConfigError(section.empty() ? key : section + "." + key, "unknown key");
    }
  }
}

template <class T>
T read(const YAML::Node& node, const char* key, const std::string& field, T fallback) {
  if (!node || !node[key]) return fallback;
  try {
    return node[key].as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(field, "has the wrong type");
  }
}

inline void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("<root>", std::string("not valid YAML: ") + e.what());
  }
  if (!root || root.IsNull()) throw ConfigError("<root>", "empty document");
  using detail::read;
  using detail::require;
  detail::reject_unknown(root, "", {"format_version", "grid", "fluid", "scheme", "run", "initial_data", "decay", "wellposed"});

  RunConfig c;
  c.format_version = read<int>(root, "format_version", "format_version", kConfigFormatVersion);
  require(c.format_version == kConfigFormatVersion, "format_version",
          "unsupported version " + std::to_string(c.format_version));

  const auto grid = root["grid"];
  detail::reject_unknown(grid, "grid", {"n", "L"});
  c.n = read<int>(grid, "n", "grid.n", c.n);
  c.L = read<double>(grid, "L", "grid.L", c.L);
  require(c.n >= 4 && c.n % 2 == 0, "grid.n", "must be even and at least 4");
  require(c.L > 0.0 && std::isfinite(c.L), "grid.L", "must be positive");

  const auto fluid = root["fluid"];
  detail::reject_unknown(fluid, "fluid", {"nu"});
  c.nu = read<double>(fluid, "nu", "fluid.nu", c.nu);
  require(c.nu > 0.0 && std::isfinite(c.nu), "fluid.nu", "must be positive");

  const auto scheme = root["scheme"];
  detail::reject_unknown(scheme, "scheme", {"kind", "dt"});
  const auto kind = read<std::string>(scheme, "kind", "scheme.kind", "etdrk2");
  try {
    c.scheme.kind = parse_scheme_kind(kind);
  } catch (const std::invalid_argument&) {
    throw ConfigError("scheme.kind", "unknown scheme '" + kind + "'");
  }
  c.scheme.dt = read<double>(scheme, "dt", "scheme.dt", c.scheme.dt);
  require(c.scheme.dt > 0.0 && std::isfinite(c.scheme.dt), "scheme.dt", "must be positive");

  const auto run = root["run"];
  detail::reject_unknown(run, "run", {"t_end", "sample_every", "seed", "output_dir", "save_snapshots"});
  c.t_end = read<double>(run, "t_end", "run.t_end", c.t_end);
  c.sample_every = read<double>(run, "sample_every", "run.sample_every", c.scheme.dt);
  c.seed = read<std::uint64_t>(run, "seed", "run.seed", c.seed);
  c.output_dir = read<std::string>(run, "output_dir", "run.output_dir", c.output_dir);
  c.save_snapshots = read<bool>(run, "save_snapshots", "run.save_snapshots", c.save_snapshots);
  require(c.t_end >= 0.0 && std::isfinite(c.t_end), "run.t_end", "must be nonnegative");
  require(c.sample_every > 0.0, "run.sample_every", "must be positive");
  try {
    steps_for(c.t_end, c.scheme.dt, "t_end");
  } catch (const std::invalid_argument&) {
    throw ConfigError("run.t_end", "must be a multiple of scheme.dt");
  }
  try {
    steps_for(c.sample_every, c.scheme.dt, "sample_every");
  } catch (const std::invalid_argument&) {
    throw ConfigError("run.sample_every", "must be a multiple of scheme.dt");
  }

  const auto init = root["initial_data"];
  require(static_cast<bool>(init), "initial_data", "is required");
  detail::reject_unknown(init, "initial_data", {"kind", "amplitude", "profile", "path", "scale_to"});
  const auto ikind = read<std::string>(init, "kind", "initial_data.kind", "taylor_green");
  if (ikind == "taylor_green") {
    c.initial.kind = InitialDataConfig::Kind::taylor_green;
  } else if (ikind == "random") {
    c.initial.kind = InitialDataConfig::Kind::random;
  } else if (ikind == "file") {
    c.initial.kind = InitialDataConfig::Kind::file;
  } else {
    throw ConfigError("initial_data.kind", "unknown kind '" + ikind + "'");
  }
  c.initial.amplitude = read<double>(init, "amplitude", "initial_data.amplitude", 1.0);
  c.initial.path = read<std::string>(init, "path", "initial_data.path", "");
  if (c.initial.kind == InitialDataConfig::Kind::file) require(!c.initial.path.empty(), "initial_data.path", "is required for kind file");
  const auto prof = init["profile"];
  detail::reject_unknown(prof, "initial_data.profile", {"shape", "exponent", "r_min", "r_max", "amplitude", "jitter"});
  auto& p = c.initial.profile;
  const auto shape = read<std::string>(prof, "shape", "initial_data.profile.shape", "plateau");
  if (shape == "plateau") {
    p.shape = SpectrumProfile::Shape::plateau;
  } else if (shape == "power_law") {
    p.shape = SpectrumProfile::Shape::power_law;
  } else {
    throw ConfigError("initial_data.profile.shape", "unknown shape '" + shape + "'");
  }
  p.exponent = read<double>(prof, "exponent", "initial_data.profile.exponent", p.exponent);
  p.r_min = read<double>(prof, "r_min", "initial_data.profile.r_min", p.r_min);
  p.r_max = read<double>(prof, "r_max", "initial_data.profile.r_max", p.r_max);
  p.amplitude = read<double>(prof, "amplitude", "initial_data.profile.amplitude", p.amplitude);
  p.jitter = read<double>(prof, "jitter", "initial_data.profile.jitter", p.jitter);
  p.seed = c.seed;
  require(p.r_min >= 0.0 && p.r_max >= p.r_min, "initial_data.profile.r_max", "must satisfy 0 <= r_min <= r_max");
  require(p.jitter >= 0.0 && p.jitter < 1.0, "initial_data.profile.jitter", "must lie in [0, 1)");
  const auto scale = init["scale_to"];
  detail::reject_unknown(scale, "initial_data.scale_to", {"norm", "value"});
  if (scale) {
    c.initial.scale_norm = read<std::string>(scale, "norm", "initial_data.scale_to.norm", "xm1");
    c.initial.scale_value = read<double>(scale, "value", "initial_data.scale_to.value", 0.0);
    require(c.initial.scale_norm == "xm1" || c.initial.scale_norm == "l2", "initial_data.scale_to.norm",
            "must be xm1 or l2");
    require(c.initial.scale_value > 0.0, "initial_data.scale_to.value", "must be positive");
  }

  const auto decay = root["decay"];
  detail::reject_unknown(decay, "decay", {"sigmas", "deltas", "checks", "eps0", "fit_window"});
  c.sigmas = read<std::vector<double>>(decay, "sigmas", "decay.sigmas", {});
  for (double s : c.sigmas) require(s > -3.0, "decay.sigmas", "every sigma must exceed -3, got " + std::to_string(s));
  c.deltas = read<std::vector<double>>(decay, "deltas", "decay.deltas", {});
  for (double d : c.deltas) require(d > 0.0, "decay.deltas", "every delta must be positive");
  c.checks = read<std::vector<std::string>>(decay, "checks", "decay.checks", {});
  for (const auto& name : c.checks) {
    const auto& known = known_checks();
    require(std::find(known.begin(), known.end(), name) != known.end(), "decay.checks", "unknown check '" + name + "'");
  }
  if (decay && decay["eps0"]) {
    c.eps0 = read<double>(decay, "eps0", "decay.eps0", 0.0);
    require(*c.eps0 > 0.0, "decay.eps0", "must be positive");
  }
  if (decay && decay["fit_window"]) {
    const auto w = read<std::vector<double>>(decay, "fit_window", "decay.fit_window", {});
    require(w.size() == 2 && w[0] > 0.0 && w[1] > w[0], "decay.fit_window", "must be [t_lo, t_hi] with 0 < t_lo < t_hi");
    c.fit_window = std::make_pair(w[0], w[1]);
  }
  const bool needs_delta = std::count(c.checks.begin(), c.checks.end(), "lowpass") +
                               std::count(c.checks.begin(), c.checks.end(), "highpass") >
                           0;
  require(!needs_delta || !c.deltas.empty(), "decay.deltas", "lowpass/highpass checks need at least one delta");
  const bool needs_case1 = std::count(c.checks.begin(), c.checks.end(), "case1") > 0;
  require(!needs_case1 || std::any_of(c.sigmas.begin(), c.sigmas.end(), [](double s) { return s > -1.5 && s < -1.0; }),
          "decay.sigmas", "case1 needs a sigma in (-3/2, -1)");

  const auto wp = root["wellposed"];
  detail::reject_unknown(wp, "wellposed", {"T_max"});
  c.wellposed_T_max = read<double>(wp, "T_max", "wellposed.T_max", c.wellposed_T_max);
  require(c.wellposed_T_max > 0.0, "wellposed.T_max", "must be positive");
  try {
    steps_for(c.wellposed_T_max, c.scheme.dt, "T_max");
  } catch (const std::invalid_argument&) {
    throw ConfigError("wellposed.T_max", "must be a multiple of scheme.dt");
  }
  return c;
}

/// Canonical text of the parsed configuration, used for hashing.
inline std::string canonical_config(const RunConfig& c) {
  YAML::Emitter e;
  e << YAML::BeginMap;
  e << YAML::Key << "format_version" << YAML::Value << c.format_version;
  e << YAML::Key << "n" << YAML::Value << c.n;
  e << YAML::Key << "L" << YAML::Value << YAML::Precision(17) << c.L;
  e << YAML::Key << "nu" << YAML::Value << YAML::Precision(17) << c.nu;
  e << YAML::Key << "scheme" << YAML::Value << to_string(c.scheme.kind);
  e << YAML::Key << "dt" << YAML::Value << YAML::Precision(17) << c.scheme.dt;
  e << YAML::Key << "t_end" << YAML::Value << YAML::Precision(17) << c.t_end;
  e << YAML::Key << "sample_every" << YAML::Value << YAML::Precision(17) << c.sample_every;
  e << YAML::Key << "seed" << YAML::Value << c.seed;
  e << YAML::Key << "initial_kind" << YAML::Value << static_cast<int>(c.initial.kind);
  e << YAML::Key << "amplitude" << YAML::Value << YAML::Precision(17) << c.initial.amplitude;
  e << YAML::Key << "profile" << YAML::Value << YAML::Flow << YAML::Precision(17) << YAML::BeginSeq << static_cast<int>(c.initial.profile.shape)
    << c.initial.profile.exponent << c.initial.profile.r_min << c.initial.profile.r_max << c.initial.profile.amplitude
    << c.initial.profile.jitter << YAML::EndSeq;
  e << YAML::Key << "path" << YAML::Value << c.initial.path;
  e << YAML::Key << "scale_norm" << YAML::Value << c.initial.scale_norm;
  e << YAML::Key << "scale_value" << YAML::Value << YAML::Precision(17) << c.initial.scale_value;
  e << YAML::Key << "sigmas" << YAML::Value << YAML::Flow << YAML::Precision(17) << c.sigmas;
  e << YAML::Key << "deltas" << YAML::Value << YAML::Flow << YAML::Precision(17) << c.deltas;
  e << YAML::Key << "checks" << YAML::Value << YAML::Flow << c.checks;
  e << YAML::Key << "eps0" << YAML::Value << YAML::Precision(17) << c.eps0_value();
  e << YAML::Key << "T_max" << YAML::Value << YAML::Precision(17) << c.wellposed_T_max;
  e << YAML::EndMap;
  return e.c_str();
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace critflow
