#pragma once

#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "critflow/config.hpp"
#include "critflow/decay.hpp"
#include "critflow/duhamel.hpp"
#include "critflow/initial_data.hpp"
#include "critflow/lemmas.hpp"
#include "critflow/norms.hpp"
#include "critflow/snapshot_io.hpp"
#include "critflow/solver.hpp"

namespace critflow {

inline constexpr const char* kToolVersion = "0.3.0";
inline constexpr const char* kOutputDirEnv = "CRITFLOW_OUTPUT_DIR";

/// Wraps a failure with the pipeline stage it came from.
class StageError : public std::runtime_error {
 public:
  StageError(const std::string& stage, const std::string& what)
      : std::runtime_error(stage + ": " + what), stage_(stage) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Shortest round-trip text for a σ or δ label; '-' becomes 'm'.
inline std::string label_of(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  for (auto& ch : s) {
    if (ch == '-') ch = 'm';
  }
  return s;
}

inline double parse_label(std::string s) {
  for (auto& ch : s) {
    if (ch == 'm') ch = '-';
  }
  return std::stod(s);
}

inline std::string hex64(std::uint64_t h) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

inline std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---- initial data -------------------------------------------------------

inline SpectralVectorField scale_to_norm(SpectralVectorField u, const std::string& norm, double value) {
  const double current = norm == "l2" ? l2_norm(u) : x_norm(u, -1.0);
  if (current == 0.0) throw std::invalid_argument("cannot rescale a zero field to a target norm");
  u *= value / current;
  return u;
}

inline SpectralVectorField build_initial_data(const RunConfig& c) {
  const Grid grid(c.n, c.L);
  SpectralVectorField u(grid);
  switch (c.initial.kind) {
    case InitialDataConfig::Kind::taylor_green:
      u = taylor_green(grid, c.initial.amplitude);
      break;
    case InitialDataConfig::Kind::random:
      u = random_divfree_field(grid, c.initial.profile);
      break;
    case InitialDataConfig::Kind::file: {
      u = read_snapshot(c.initial.path);
      if (u.grid() != grid) throw std::invalid_argument("snapshot grid does not match grid.n / grid.L");
      break;
    }
  }
  if (!c.initial.scale_norm.empty()) u = scale_to_norm(std::move(u), c.initial.scale_norm, c.initial.scale_value);
  require_state(u);
  return u;
}

// ---- CSV ---------------------------------------------------------------

inline std::vector<double> extra_sigmas(const NormSeries& s) {
  std::vector<double> out;
  for (double sigma : s.sigmas) {
    if (sigma != -1.0 && sigma != 0.0 && sigma != 1.0) out.push_back(sigma);
  }
  return out;
}

inline std::string norms_csv(const NormSeries& s) {
  const auto extra = extra_sigmas(s);
  std::string out = "t,l2,x_m1,x_0,x_1";
  for (double sigma : extra) out += ",x_" + label_of(sigma);
  out += ",gevrey,hdot1\n";
  for (const auto& n : s.samples) {
    out += format_double(n.t) + "," + format_double(n.l2) + "," + format_double(n.x_at(-1.0)) + "," +
           format_double(n.x_at(0.0)) + "," + format_double(n.x_at(1.0));
    for (double sigma : extra) out += "," + format_double(n.x_at(sigma));
    out += "," + format_double(n.gevrey_xm1) + "," + format_double(n.hdot1) + "\n";
  }
  return out;
}

inline std::string aux_csv(const NormSeries& s) {
  std::string out = "t,gevrey_full,gevrey_full_x1,split_lambda,split_low,split_high,split_c1,dissipation";
  for (double d : s.deltas) {
    const auto l = label_of(d);
    out += ",low_l2_d" + l + ",low_x1_d" + l + ",high_l2_d" + l;
  }
  out += "\n";
  for (const auto& a : s.aux) {
    out += format_double(a.t) + "," + format_double(a.gevrey_full) + "," + format_double(a.gevrey_full_x1) + "," +
           format_double(a.split_lambda) + "," + format_double(a.split_low) + "," + format_double(a.split_high) + "," +
           format_double(a.split_c1) + "," + format_double(a.dissipation);
    for (const auto& b : a.bands) {
      out += "," + format_double(b.low_l2) + "," + format_double(b.low_x1) + "," + format_double(b.high_l2);
    }
    out += "\n";
  }
  return out;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

inline std::vector<std::vector<double>> read_csv(const std::filesystem::path& path, std::vector<std::string>& header) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error(path.string() + ": missing header");
  header = split_csv_line(line);
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) throw std::runtime_error(path.string() + ": ragged row");
    std::vector<double> row(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) row[i] = std::strtod(cells[i].c_str(), nullptr);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

}  // namespace detail

/// Rebuilds a series from norms.csv and aux.csv (deltas come from the manifest).
inline NormSeries read_series(const std::filesystem::path& dir, double nu, const std::vector<double>& deltas) {
  NormSeries s;
  s.nu = nu;
  s.deltas = deltas;
  std::vector<std::string> h;
  const auto rows = detail::read_csv(dir / "norms.csv", h);
  if (h.size() < 7 || h[0] != "t" || h[1] != "l2" || h[2] != "x_m1" || h[3] != "x_0" || h[4] != "x_1" ||
      h[h.size() - 2] != "gevrey" || h.back() != "hdot1") {
    throw std::runtime_error("norms.csv: unexpected header");
  }
  std::vector<double> extra;
  for (std::size_t c = 5; c + 2 < h.size(); ++c) {
    if (h[c].rfind("x_", 0) != 0) throw std::runtime_error("norms.csv: bad column " + h[c]);
    extra.push_back(parse_label(h[c].substr(2)));
  }
  std::vector<double> sig = extra;
  s.sigmas = normalize_sigmas(sig);
  for (const auto& r : rows) {
    NormSample n;
    n.t = r[0];
    n.l2 = r[1];
    n.x[-1.0] = r[2];
    n.x[0.0] = r[3];
    n.x[1.0] = r[4];
    for (std::size_t e = 0; e < extra.size(); ++e) n.x[extra[e]] = r[5 + e];
    n.gevrey_xm1 = r[h.size() - 2];
    n.hdot1 = r.back();
    s.samples.push_back(std::move(n));
  }
  std::vector<std::string> ha;
  const auto arows = detail::read_csv(dir / "aux.csv", ha);
  if (ha.size() != 8 + 3 * deltas.size() || arows.size() != rows.size()) throw std::runtime_error("aux.csv: shape mismatch");
  for (const auto& r : arows) {
    AuxSample a{r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[7], {}};
    for (std::size_t d = 0; d < deltas.size(); ++d) a.bands.push_back({r[8 + 3 * d], r[9 + 3 * d], r[10 + 3 * d]});
    s.aux.push_back(std::move(a));
  }
  return s;
}

// ---- checks ------------------------------------------------------------

/// Everything a verifier needs besides the series.
struct CheckContext {
  double nu = 1.0;
  double u0_l2 = 0.0;
  double u0_xm1 = 0.0;
  double eps0 = 0.25;
  int n = 32;
  double L = kTwoPi;
  double dt = 1e-3;
  int order = 2;
};

struct CheckOutcome {
  std::string name;
  std::string verdict;  // "holds", "fails" or "not_applicable"
  nlohmann::json report;
};

/// Relative energy-balance tolerance C·dt^p with C = 10.
inline double energy_tolerance(double dt, int order) { return 10.0 * std::pow(dt, order); }

inline std::vector<CheckOutcome> run_checks(const NormSeries& s, const CheckContext& ctx,
                                            const std::vector<std::string>& names) {
  std::vector<CheckOutcome> out;
  const Grid grid(ctx.n, ctx.L);
  auto verdict = [](bool applicable, bool holds) {
    return !applicable ? std::string("not_applicable") : holds ? std::string("holds") : std::string("fails");
  };
  for (const auto& name : names) {
    CheckOutcome o;
    o.name = name;
    if (name == "energy") {
      const auto e = energy_balance(s);
      const double tol = energy_tolerance(ctx.dt, ctx.order) * e.initial_energy;
      const bool ok = e.max_abs_residual <= tol;
      o.report = {{"name", "energy"}, {"max_abs_residual", e.max_abs_residual}, {"tolerance", tol},
                  {"initial_energy", e.initial_energy}, {"times", e.times}, {"residual", e.residual}, {"all_hold", ok}};
      o.verdict = verdict(true, ok);
    } else if (name == "lemma1") {
      BoundReport r;
      r.name = "lemma1";
      for (const auto& n : s.samples) r.add(n.t, n.x_at(0.0), std::sqrt(n.x_at(-1.0) * n.x_at(1.0)));
      o.report = r;
      o.verdict = verdict(true, r.all_hold);
    } else if (name == "gronwall") {
      const auto r = verify_gronwall(s, ctx.u0_l2);
      o.report = r;
      o.verdict = verdict(true, r.all_hold);
    } else if (name == "eQ2") {
      const auto r = verify_eQ2(s, ctx.u0_xm1, ctx.nu);
      o.report = r;
      o.verdict = verdict(r.applicable, r.all_hold);
    } else if (name == "gevrey") {
      const auto r = verify_gevrey(s, ctx.u0_xm1, ctx.nu, ctx.eps0);
      o.report = r;
      o.verdict = verdict(r.applicable, r.all_hold);
    } else if (name == "split") {
      const auto r = verify_split_inequality(s, ctx.u0_l2);
      o.report = r;
      o.verdict = verdict(true, r.low.all_hold && r.high.all_hold && r.total.all_hold);
    } else if (name == "lowpass" || name == "highpass") {
      nlohmann::json per_delta = nlohmann::json::array();
      bool ok = true;
      for (double d : s.deltas) {
        if (name == "lowpass") {
          const auto r = verify_lowpass_bound(s, d);
          ok = ok && r.all_hold;
          per_delta.push_back(r);
        } else {
          const auto r = verify_highpass_bound(s, d);
          ok = ok && r.all_hold();
          per_delta.push_back(r);
        }
      }
      o.report = {{"name", name}, {"per_delta", per_delta}, {"all_hold", ok}};
      o.verdict = verdict(true, ok);
    } else if (name == "case1") {
      nlohmann::json per_sigma = nlohmann::json::array();
      bool ok = true;
      for (double sigma : s.sigmas) {
        if (!(sigma > -1.5 && sigma < -1.0)) continue;
        const auto r = verify_sigma_decay_case1(s, sigma, lattice_shell_constant(grid, sigma));
        ok = ok && r.all_hold;
        per_sigma.push_back(r);
      }
      o.report = {{"name", name}, {"per_sigma", per_sigma}, {"all_hold", ok}};
      o.verdict = verdict(!per_sigma.empty(), ok);
    } else if (name == "case2") {
      nlohmann::json per_sigma = nlohmann::json::array();
      bool ok = true;
      for (double sigma : s.sigmas) {
        if (!(sigma > -1.0)) continue;
        const auto r = verify_sigma_decay_case2(s, sigma);
        ok = ok && r.all_hold;
        per_sigma.push_back(r);
      }
      o.report = {{"name", name}, {"per_sigma", per_sigma}, {"all_hold", ok}};
      o.verdict = verdict(!per_sigma.empty(), ok);
    } else {
      throw std::invalid_argument("unknown check '" + name + "'");
    }
    out.push_back(std::move(o));
  }
  return out;
}

// ---- run ---------------------------------------------------------------

struct RunManifest {
  std::string config_hash;
  std::string tool_version = kToolVersion;
  std::string started;
  std::string finished;
  std::vector<std::string> files;
  std::map<std::string, std::string> verdicts;
  bool partial = false;
  std::string failed_stage;
  std::string error;
  nlohmann::json run;  // grid, ν, scheme, datum norms

  bool all_hold() const {
    if (partial) return false;
    for (const auto& [k, v] : verdicts) {
      if (v == "fails") return false;
    }
    return true;
  }
};

/// Manifest body without timestamps; this is what determinism compares.
inline nlohmann::json manifest_body(const RunManifest& m) {
  return nlohmann::json{{"config_hash", m.config_hash}, {"tool_version", m.tool_version}, {"files", m.files},
                        {"verdicts", m.verdicts},       {"partial", m.partial},           {"failed_stage", m.failed_stage},
                        {"error", m.error},             {"run", m.run}};
}

inline nlohmann::json manifest_json(const RunManifest& m) {
  auto j = manifest_body(m);
  j["timestamps"] = {{"started", m.started}, {"finished", m.finished}};
  return j;
}

inline std::filesystem::path resolve_output_dir(const RunConfig& c) {
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
  return c.output_dir;
}

inline std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

/// simulate → record → verifiers, writing every artifact into the output directory.
inline RunManifest run(const RunConfig& c, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  RunManifest m;
  m.started = utc_now();
  m.config_hash = hex64(fnv1a(canonical_config(c)));
  fs::create_directories(out_dir);
  std::string stage = "initial_data";
  auto write_manifest = [&] {
    m.finished = utc_now();
    detail::write_text(out_dir / "manifest.json", dump_json(manifest_json(m)));
  };
  try {
    const auto u0 = build_initial_data(c);
    write_snapshot(out_dir / "u0.field", u0);
    m.files.push_back("u0.field");
    const double u0_l2 = l2_norm(u0);
    const double u0_xm1 = x_norm(u0, -1.0);
    m.run = {{"n", c.n},
             {"L", c.L},
             {"nu", c.nu},
             {"scheme", to_string(c.scheme.kind)},
             {"dt", c.scheme.dt},
             {"t_end", c.t_end},
             {"sample_every", c.sample_every},
             {"seed", c.seed},
             {"sigmas", c.sigmas},
             {"deltas", c.deltas},
             {"eps0", c.eps0_value()},
             {"u0_l2", u0_l2},
             {"u0_xm1", u0_xm1}};

    stage = "simulate";
    SeriesRecorder rec(c.nu, c.sigmas, c.deltas);
    nlohmann::json traj_times = nlohmann::json::array();
    if (c.save_snapshots) fs::create_directories(out_dir / "trajectory");
    std::size_t index = 0;
    long long step_index = 0;
    const long long per_sample = std::max<long long>(1, steps_for(c.sample_every, c.scheme.dt, "sample_every"));
    const long long last_step = steps_for(c.t_end, c.scheme.dt, "t_end");
    integrate(u0, c.nu, c.scheme, c.t_end, c.scheme.dt, [&](double t, const SpectralVectorField& u) {
      const long long k = step_index++;
      if (k % per_sample != 0 && k != last_step) {
        rec.track(t, u);
        return;
      }
      rec(t, u);
      if (c.save_snapshots) {
        char name[32];
        std::snprintf(name, sizeof name, "state_%06zu.field", index);
        write_snapshot(out_dir / "trajectory" / name, u);
        traj_times.push_back({{"t", t}, {"file", name}});
      }
      ++index;
    });
    if (c.save_snapshots) {
      detail::write_text(out_dir / "trajectory" / "manifest.json",
                         dump_json({{"nu", c.nu},
                                    {"scheme", to_string(c.scheme.kind)},
                                    {"dt", c.scheme.dt},
                                    {"grid", {{"n", c.n}, {"L", c.L}}},
                                    {"states", traj_times}}));
      m.files.push_back("trajectory/manifest.json");
    }

    stage = "record";
    const NormSeries series = rec.take();
    detail::write_text(out_dir / "norms.csv", norms_csv(series));
    detail::write_text(out_dir / "aux.csv", aux_csv(series));
    m.files.push_back("norms.csv");
    m.files.push_back("aux.csv");

    stage = "checks";
    const CheckContext ctx{c.nu, u0_l2, u0_xm1, c.eps0_value(), c.n, c.L, c.scheme.dt, c.scheme.order()};
    if (!c.checks.empty()) fs::create_directories(out_dir / "reports");
    for (auto& o : run_checks(series, ctx, c.checks)) {
      const std::string file = "reports/" + o.name + ".json";
      detail::write_text(out_dir / file, dump_json(o.report));
      m.files.push_back(file);
      m.verdicts[o.name] = o.verdict;
    }
    if (c.fit_window) {
      nlohmann::json fits = nlohmann::json::array();
      for (double sigma : series.sigmas) fits.push_back(fit_decay_slope(series, sigma, c.fit_window->first, c.fit_window->second));
      detail::write_text(out_dir / "fits.json", dump_json(fits));
      m.files.push_back("fits.json");
    }
  } catch (const std::exception& e) {
    m.partial = true;
    m.failed_stage = stage;
    m.error = e.what();
    write_manifest();
    throw StageError(stage, e.what());
  }
  write_manifest();
  return m;
}

/// Loaded form of a run directory, for re-checking stored runs.
struct StoredRun {
  nlohmann::json manifest;
  NormSeries series;
  CheckContext context;
};

inline StoredRun load_run(const std::filesystem::path& dir) {
  std::ifstream is(dir / "manifest.json");
  if (!is) throw std::runtime_error("no manifest.json in " + dir.string());
  StoredRun r;
  r.manifest = nlohmann::json::parse(is);
  const auto& run = r.manifest.at("run");
  const double nu = run.at("nu").get<double>();
  r.series = read_series(dir, nu, run.at("deltas").get<std::vector<double>>());
  r.context = {nu,
               run.at("u0_l2").get<double>(),
               run.at("u0_xm1").get<double>(),
               run.at("eps0").get<double>(),
               run.at("n").get<int>(),
               run.at("L").get<double>(),
               run.at("dt").get<double>(),
               parse_scheme_kind(run.at("scheme").get<std::string>()) == StepScheme::Kind::etdrk2 ? 2 : 1};
  return r;
}

}  // namespace critflow
