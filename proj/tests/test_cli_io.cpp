#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "critflow/critflow.hpp"

using namespace critflow;
namespace fs = std::filesystem;

namespace {

constexpr const char* kMinimal = "initial_data:\n  kind: taylor_green\n";

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("critflow_test_" + name);
  fs::remove_all(d);
  return d;
}

std::string config_error_field(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

int cli(const std::string& args, const std::string& out = "/dev/null") {
  const std::string cmd = std::string(CRITFLOW_CLI_PATH) + " " + args + " > " + out + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

constexpr const char* kSmallRun = R"(grid: {n: 8}
fluid: {nu: 1.0}
scheme: {kind: etdrk2, dt: 0.01}
run: {t_end: 0.2, sample_every: 0.05, seed: 3}
initial_data:
  kind: random
  profile: {r_min: 1.0, r_max: 2.0, amplitude: 0.05}
decay:
  sigmas: [-1.25, 0.5]
  deltas: [1.5]
  checks: [energy, gronwall, eQ2, lowpass, highpass]
)";

}  // namespace

TEST(Config, MinimalDocumentFillsDefaults) {
  const auto c = parse_config(kMinimal);
  EXPECT_EQ(c.n, 32);
  EXPECT_DOUBLE_EQ(c.L, kTwoPi);
  EXPECT_DOUBLE_EQ(c.nu, 1.0);
  EXPECT_EQ(c.scheme.kind, StepScheme::Kind::etdrk2);
  EXPECT_DOUBLE_EQ(c.scheme.dt, 1e-3);
  EXPECT_DOUBLE_EQ(c.sample_every, 1e-3);
  EXPECT_TRUE(c.checks.empty());
  EXPECT_DOUBLE_EQ(c.eps0_value(), 0.25);
}

TEST(Config, ErrorsNameTheOffendingKey) {
  EXPECT_EQ(config_error_field(std::string(kMinimal) + "scheme: {dt: -1}\n"), "scheme.dt");
  EXPECT_EQ(config_error_field(std::string(kMinimal) + "decay: {sigmas: [-3.5]}\n"), "decay.sigmas");
  EXPECT_EQ(config_error_field(std::string(kMinimal) + "grid: {n: 8, spacing: 2}\n"), "grid.spacing");
  EXPECT_EQ(config_error_field(std::string(kMinimal) + "extra: 1\n"), "extra");
  EXPECT_EQ(config_error_field(std::string(kMinimal) + "format_version: 2\n"), "format_version");
  EXPECT_EQ(config_error_field(std::string(kMinimal) + "grid: {n: 5}\n"), "grid.n");
  EXPECT_EQ(config_error_field(std::string(kMinimal) + "scheme: {kind: rk4}\n"), "scheme.kind");
  EXPECT_EQ(config_error_field(std::string(kMinimal) + "run: {t_end: 0.0105}\n"), "run.t_end");
  EXPECT_EQ(config_error_field(std::string(kMinimal) + "decay: {checks: [lowpass]}\n"), "decay.deltas");
  EXPECT_EQ(config_error_field(std::string(kMinimal) + "decay: {checks: [case1], sigmas: [0]}\n"), "decay.sigmas");
  EXPECT_EQ(config_error_field(std::string(kMinimal) + "decay: {checks: [bogus]}\n"), "decay.checks");
  EXPECT_EQ(config_error_field("grid: {n: 8}\n"), "initial_data");
  EXPECT_EQ(config_error_field("grid: [\n"), "<root>");
  EXPECT_EQ(config_error_field(std::string(kMinimal) + "fluid: {nu: abc}\n"), "fluid.nu");
  EXPECT_EQ(config_error_field(std::string(kMinimal) + "grid: {n: 6}\n"), "<accepted>");
}

TEST(Config, CanonicalHashIgnoresFormatting) {
  const auto a = parse_config("initial_data: {kind: taylor_green}\nfluid: {nu: 0.5}\n");
  const auto b = parse_config("fluid:\n  nu: 0.50\ninitial_data:\n  kind: taylor_green\n");
  EXPECT_EQ(canonical_config(a), canonical_config(b));
  EXPECT_EQ(fnv1a(canonical_config(a)), fnv1a(canonical_config(b)));
  const auto c = parse_config("initial_data: {kind: taylor_green}\nfluid: {nu: 0.25}\n");
  EXPECT_NE(fnv1a(canonical_config(a)), fnv1a(canonical_config(c)));
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Io, LabelsRoundTrip) {
  for (double v : {-1.25, -1.0, 0.0, 0.5, 1.5, 0.1}) {
    EXPECT_EQ(parse_label(label_of(v)), v);
  }
  EXPECT_EQ(label_of(-1.25), "m1.25");
  EXPECT_EQ(label_of(1.5), "1.5");
}

TEST(Io, NormsOnlyRunWhenNoChecks) {
  const auto dir = fresh_dir("norms_only");
  auto c = parse_config("grid: {n: 8}\nscheme: {dt: 0.01}\nrun: {t_end: 0.05, sample_every: 0.01}\n"
                        "initial_data: {kind: taylor_green, amplitude: 0.1}\n");
  const auto m = run(c, dir);
  EXPECT_TRUE(m.verdicts.empty());
  EXPECT_TRUE(m.all_hold());
  EXPECT_FALSE(fs::exists(dir / "reports"));
  EXPECT_EQ(m.files, (std::vector<std::string>{"u0.field", "norms.csv", "aux.csv"}));
  const auto csv = slurp(dir / "norms.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,l2,x_m1,x_0,x_1,gevrey,hdot1");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
  fs::remove_all(dir);
}

TEST(Io, RunStoresReloadableSeries) {
  const auto dir = fresh_dir("reload");
  const auto c = parse_config(kSmallRun);
  const auto m = run(c, dir);
  EXPECT_TRUE(m.all_hold());
  EXPECT_EQ(m.verdicts.size(), 5u);
  const auto csv = slurp(dir / "norms.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,l2,x_m1,x_0,x_1,x_m1.25,x_0.5,gevrey,hdot1");

  const auto stored = load_run(dir);
  EXPECT_EQ(stored.series.samples.size(), 5u);
  EXPECT_EQ(stored.series.sigmas, (std::vector<double>{-1.25, -1.0, 0.0, 0.5, 1.0}));
  EXPECT_EQ(stored.context.order, 2);
  const auto u0 = read_snapshot(dir / "u0.field");
  EXPECT_EQ(stored.series.samples.front().x_at(-1.25), x_norm(u0, -1.25));
  EXPECT_EQ(stored.series.samples.front().l2, l2_norm(u0));
  // Checks re-run on the reloaded series reproduce the stored verdicts.
  for (const auto& o : run_checks(stored.series, stored.context, c.checks)) {
    EXPECT_EQ(o.verdict, m.verdicts.at(o.name)) << o.name;
    EXPECT_EQ(dump_json(o.report), slurp(dir / ("reports/" + o.name + ".json"))) << o.name;
  }
  fs::remove_all(dir);
}

TEST(Io, RepeatedRunsAreByteIdentical) {
  const auto c = parse_config(kSmallRun);
  const auto d1 = fresh_dir("det1");
  const auto d2 = fresh_dir("det2");
  const auto m1 = run(c, d1);
  const auto m2 = run(c, d2);
  EXPECT_EQ(manifest_body(m1).dump(), manifest_body(m2).dump());
  for (const auto& f : m1.files) EXPECT_EQ(slurp(d1 / f), slurp(d2 / f)) << f;
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST(Io, FailedStageIsRecorded) {
  const auto dir = fresh_dir("failed");
  const auto c = parse_config("grid: {n: 8}\nscheme: {dt: 0.01}\nrun: {t_end: 0.05, sample_every: 0.01}\n"
                              "initial_data: {kind: taylor_green, amplitude: 200.0}\n");
  try {
    run(c, dir);
    ADD_FAILURE() << "expected a stage error";
  } catch (const StageError& e) {
    EXPECT_EQ(e.stage(), "simulate");
  }
  std::ifstream is(dir / "manifest.json");
  const auto j = nlohmann::json::parse(is);
  EXPECT_TRUE(j.at("partial").get<bool>());
  EXPECT_EQ(j.at("failed_stage"), "simulate");
  fs::remove_all(dir);
}

TEST(Cli, ExitCodes) {
  const auto dir = fresh_dir("cli");
  fs::create_directories(dir);
  Grid g(8, kTwoPi);
  write_snapshot(dir / "cos.field", shear_wave(g, {1, 0, 0}, 1, 1.0));
  EXPECT_EQ(cli("norms " + (dir / "cos.field").string(), (dir / "table.txt").string()), 0);
  EXPECT_NE(slurp(dir / "table.txt").find("x_m1       2\n"), std::string::npos);
  EXPECT_EQ(cli("lemmas --trials 50 --seed 7"), 0);
  EXPECT_EQ(cli("surrogate --profile indicator:1 --times 0.5,2"), 0);
  EXPECT_EQ(cli("nosuchcommand"), 2);
  {
    std::ofstream os(dir / "bad.yaml");
    os << kMinimal << "scheme: {dt: -1}\n";
  }
  EXPECT_EQ(cli("run " + (dir / "bad.yaml").string()), 2);
  {
    std::ofstream os(dir / "ok.yaml");
    os << "grid: {n: 8}\nscheme: {dt: 0.01}\nrun: {t_end: 0.05, sample_every: 0.01, output_dir: "
       << (dir / "out").string() << "}\ninitial_data: {kind: taylor_green, amplitude: 0.1}\n"
       << "decay: {checks: [energy]}\n";
  }
  EXPECT_EQ(cli("run " + (dir / "ok.yaml").string()), 0);
  EXPECT_EQ(cli("decay " + (dir / "out").string() + " --check energy"), 0);
  EXPECT_EQ(cli("decay " + (dir / "out").string() + " --check bogus"), 2);
  fs::remove_all(dir);
}
