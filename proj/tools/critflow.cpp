// critflow command-line driver.
//
// Exit status: 0 every requested verdict holds, 1 a verdict failed,
// 2 usage or configuration error, 3 runtime failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "critflow/critflow.hpp"

namespace {

using namespace critflow;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

std::string read_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("<file>", "cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stod(item));
  }
  return out;
}

int cmd_run(const std::string& config_path) {
  const auto cfg = parse_config(read_file(config_path));
  const auto dir = resolve_output_dir(cfg);
  const auto m = run(cfg, dir);
  std::cout << dump_json(manifest_json(m));
  return m.all_hold() ? kExitOk : kExitFailed;
}

int cmd_norms(const std::string& path, const std::string& sigma_list) {
  const auto u = read_snapshot(path);
  const auto sigmas = normalize_sigmas(parse_list(sigma_list));
  std::printf("%-10s %s\n", "norm", "value");
  std::printf("%-10s %.17g\n", "l2", l2_norm(u));
  for (double s : sigmas) std::printf("%-10s %.17g\n", ("x_" + label_of(s)).c_str(), x_norm(u, s));
  std::printf("%-10s %.17g\n", "hdot1", hs_dot_norm(u, 1.0));
  return kExitOk;
}

int cmd_lemmas(std::size_t trials, std::uint64_t seed, int n) {
  const auto r = run_lemma_sweep(trials, seed, n);
  std::cout << nlohmann::json(r).dump(2) << "\n";
  return r.all_hold() ? kExitOk : kExitFailed;
}

int cmd_wellposed(const std::string& config_path) {
  const auto cfg = parse_config(read_file(config_path));
  const auto u0 = build_initial_data(cfg);
  const auto r = run_wellposed(u0, cfg.nu, cfg.scheme, cfg.wellposed_T_max, kStandingL2);
  std::cout << nlohmann::json(r).dump(2) << "\n";
  if (!r.conditions.all_hold) return kExitFailed;
  if (!r.contraction.converged) return kExitFailed;
  return kExitOk;
}

int cmd_decay(const std::string& dir, const std::string& check, const std::string& window,
              const std::string& sigma_list) {
  const auto stored = load_run(dir);
  std::vector<std::string> names;
  if (check == "all") {
    names = known_checks();
  } else {
    names.push_back(check);
  }
  // Drop checks the stored series cannot feed.
  std::vector<std::string> usable;
  for (const auto& n : names) {
    if ((n == "lowpass" || n == "highpass") && stored.series.deltas.empty()) continue;
    usable.push_back(n);
  }
  nlohmann::json out;
  bool ok = true;
  for (auto& o : run_checks(stored.series, stored.context, usable)) {
    out["checks"][o.name] = {{"verdict", o.verdict}, {"report", o.report}};
    ok = ok && o.verdict != "fails";
  }
  out["limsup"] = limsup_probe(stored.series, lattice_shell_constant(Grid(stored.context.n, stored.context.L), -1.0),
                               stored.context.u0_l2);
  if (!window.empty()) {
    const auto colon = window.find(':');
    if (colon == std::string::npos) throw CLI::ValidationError("--fit-window", "expected t_lo:t_hi");
    const double lo = std::stod(window.substr(0, colon));
    const double hi = std::stod(window.substr(colon + 1));
    auto sigmas = sigma_list.empty() ? stored.series.sigmas : parse_list(sigma_list);
    for (double s : sigmas) out["fits"].push_back(fit_decay_slope(stored.series, s, lo, hi));
  }
  std::cout << out.dump(2) << "\n";
  return ok ? kExitOk : kExitFailed;
}

int cmd_surrogate(const std::string& profile, double nu, const std::string& times) {
  const auto p = parse_profile(profile);
  const auto rows = continuum_linear_decay(p, nu, parse_list(times));
  std::printf("t,xm1,l2\n");
  for (const auto& r : rows) std::printf("%.17g,%.17g,%.17g\n", r.t, r.xm1, r.l2);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"critflow: critical-norm experiments for periodic incompressible flow"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "simulate, record norms and evaluate the configured checks");
  run_cmd->add_option("config", config_path, "YAML run configuration")->required()->check(CLI::ExistingFile);

  std::string field_path, norm_sigmas = "-1,0,1";
  auto* norms_cmd = app.add_subcommand("norms", "print the norm table of a field snapshot");
  norms_cmd->add_option("field", field_path, "snapshot file")->required()->check(CLI::ExistingFile);
  norms_cmd->add_option("--sigma", norm_sigmas, "comma-separated sigma list");

  std::size_t trials = 1000;
  std::uint64_t seed = 7;
  int lemma_n = 16;
  auto* lemmas_cmd = app.add_subcommand("lemmas", "property sweep of the interpolation and product inequalities");
  lemmas_cmd->add_option("--trials", trials, "number of random fields")->check(CLI::PositiveNumber);
  lemmas_cmd->add_option("--seed", seed, "random seed");
  lemmas_cmd->add_option("--n", lemma_n, "grid points per axis")->check(CLI::Range(4, 64));

  std::string wp_config;
  auto* wp_cmd = app.add_subcommand("wellposed", "rescale, split, condition search and contraction");
  wp_cmd->add_option("config", wp_config, "YAML run configuration")->required()->check(CLI::ExistingFile);

  std::string run_dir, check = "all", window, fit_sigmas;
  auto* decay_cmd = app.add_subcommand("decay", "re-run decay verifiers on a stored run directory");
  decay_cmd->add_option("run_dir", run_dir, "output directory of a previous run")->required()->check(CLI::ExistingDirectory);
  decay_cmd->add_option("--check", check, "verifier name or 'all'");
  decay_cmd->add_option("--fit-window", window, "t_lo:t_hi for slope fits");
  decay_cmd->add_option("--sigma", fit_sigmas, "comma-separated sigma list for fits");

  std::string profile = "indicator:1", times = "0.01,0.1,1,10,100";
  double nu = 1.0;
  auto* sur_cmd = app.add_subcommand("surrogate", "continuum heat-flow norms of a radial spectrum");
  sur_cmd->add_option("--profile", profile, "indicator:R | gaussian:W | power:A:R");
  sur_cmd->add_option("--nu", nu, "viscosity")->check(CLI::PositiveNumber);
  sur_cmd->add_option("--times", times, "comma-separated times");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(config_path);
    if (*norms_cmd) return cmd_norms(field_path, norm_sigmas);
    if (*lemmas_cmd) return cmd_lemmas(trials, seed, lemma_n);
    if (*wp_cmd) return cmd_wellposed(wp_config);
    if (*decay_cmd) {
      if (check != "all") {
        const auto& known = known_checks();
        if (std::find(known.begin(), known.end(), check) == known.end()) {
          std::cerr << "unknown check '" << check << "'\n";
          return kExitUsage;
        }
      }
      return cmd_decay(run_dir, check, window, fit_sigmas);
    }
    if (*sur_cmd) return cmd_surrogate(profile, nu, times);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
