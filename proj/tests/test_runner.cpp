#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "fragsim/runner.hpp"
#include "json.hpp"

using namespace fragsim;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path temp_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("fragsim_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const json& j) {
  const fs::path p = dir / "config.json";
  std::ofstream out(p);
  out << j.dump(2);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_summary(const fs::path& dir) { return json::parse(slurp(dir / "summary.json")); }

}  // namespace

TEST_CASE("moments mode emits the exact factorial sequence") {
  const fs::path dir = temp_dir("moments");
  const json cfg = {{"mode", "moments"},
                    {"seed", 7},
                    {"kernel", {{"family", "power_law"}, {"beta", 1.0}}},
                    {"alpha", 1.0},
                    {"n", 4}};
  const cli::RunConfig rc = cli::load_config(write_config(dir, cfg));
  CHECK(cli::run(rc, dir / "out") == 0);
  const json s = read_summary(dir / "out");
  REQUIRE(s["moments"].size() == 4);
  CHECK(s["moments"][0].get<double>() == doctest::Approx(2.0));
  CHECK(s["moments"][1].get<double>() == doctest::Approx(6.0));
  CHECK(s["moments"][2].get<double>() == doctest::Approx(24.0));
  CHECK(s["moments"][3].get<double>() == doctest::Approx(120.0));
  CHECK(s["seed"] == 7);
  CHECK(s.contains("config_hash"));
}

TEST_CASE("config validation failures") {
  CHECK_THROWS_AS(cli::config_from_json(json{{"mode", "moments"}}), ConfigError);  // no seed
  CHECK_THROWS_AS(cli::config_from_json(json{{"seed", 1}}), ConfigError);          // no mode
  CHECK_THROWS_AS(cli::config_from_json(json{{"mode", "warp"}, {"seed", 1}}), ConfigError);
  CHECK_THROWS_AS(cli::kernel_from_json(json{{"family", "nope"}}), ConfigError);
  CHECK_THROWS_AS(cli::kernel_from_json(json{{"family", "power_law"}}), ConfigError);
  const json bad = {{"mode", "moments"}, {"seed", 1}, {"alpha", 1.0}};
  CHECK_THROWS_AS(cli::run(cli::config_from_json(bad), temp_dir("nokernel")), ConfigError);
}

TEST_CASE("FRAGSIM_SEED environment override") {
  ::setenv("FRAGSIM_SEED", "31415", 1);
  const cli::RunConfig rc = cli::config_from_json(json{{"mode", "moments"}, {"seed", 1}});
  CHECK(rc.seed == 31415);
  ::unsetenv("FRAGSIM_SEED");
  const cli::RunConfig rc2 = cli::config_from_json(json{{"mode", "moments"}, {"seed", 1}});
  CHECK(rc2.seed == 1);
}

TEST_CASE("tabulated kernels load from CSV") {
  const fs::path dir = temp_dir("csvkernel");
  {
    std::ofstream csv(dir / "g.csv");
    csv << "z,g\n";
    for (int i = 0; i < 100; ++i) {
      const double z = 0.001 + (1.0 - 0.001) * i / 99.0;
      csv << z << ',' << 2.0 * z << '\n';
    }
  }
  const Kernel k = cli::kernel_from_json(json{{"family", "tabulated"}, {"path", "g.csv"}}, dir);
  CHECK(k.moment(1.0) == doctest::Approx(2.0 / 3.0).epsilon(1e-4));
  CHECK_THROWS_AS(
      cli::kernel_from_json(json{{"family", "tabulated"}, {"path", "missing.csv"}}, dir),
      ConfigError);
}

TEST_CASE("ensemble runs are deterministic byte-for-byte") {
  const fs::path dir = temp_dir("determinism");
  const json cfg = {{"mode", "simulate"},
                    {"seed", 123},
                    {"kernel", {{"family", "power_law"}, {"beta", 1.0}}},
                    {"alpha", 1.0},
                    {"n_paths", 500},
                    {"x0", 1.0},
                    {"observe_times", {1.0, 2.0}}};
  const cli::RunConfig rc = cli::load_config(write_config(dir, cfg));
  CHECK(cli::run(rc, dir / "a", 1) == 0);
  CHECK(cli::run(rc, dir / "b", 4) == 0);  // thread count must not matter
  CHECK(slurp(dir / "a" / "paths.csv") == slurp(dir / "b" / "paths.csv"));
  CHECK(!slurp(dir / "a" / "paths.csv").empty());
}

TEST_CASE("pde mode writes snapshots and conserves mass") {
  const fs::path dir = temp_dir("pde");
  const json cfg = {{"mode", "pde"},
                    {"seed", 9},
                    {"kernel", {{"family", "power_law"}, {"beta", 1.0}}},
                    {"alpha", 1.0},
                    {"grid", {{"x_min", 1e-3}, {"x_max", 30.0}, {"n_cells", 64}}},
                    {"initial", {{"type", "point"}, {"x0", 2.0}}},
                    {"observe_times", {0.5, 1.0}}};
  CHECK(cli::run(cli::config_from_json(cfg), dir) == 0);
  const json s = read_summary(dir);
  CHECK(std::abs(s["mass_drift"].get<double>()) < 1e-10);
  CHECK(s["checkpoints"].size() == 2);
  CHECK(s["checkpoints"][1].contains("l1_to_profile"));
  CHECK(fs::exists(dir / "snapshots.csv"));
}

TEST_CASE("shatter mode summarizes the exponential functional") {
  const fs::path dir = temp_dir("shatter");
  const json cfg = {{"mode", "shatter"},
                    {"seed", 77},
                    {"kernel", {{"family", "power_law"}, {"beta", 1.0}}},
                    {"alpha", -1.0},
                    {"n_paths", 5000},
                    {"x0", 1.0},
                    {"observe_times", {2.0, 10.0}}};
  CHECK(cli::run(cli::config_from_json(cfg), dir) == 0);
  const json s = read_summary(dir);
  const double mean = s["mean_i_inf"].get<double>();
  const double se = s["std_error_i_inf"].get<double>();
  CHECK(std::abs(mean - 2.0) < 3.0 * se);
  CHECK(s["live"].size() == 2);
}

TEST_CASE("mode mismatch between config and subcommand is rejected") {
  // modeled by parse_mode + mode_name round-trip
  for (const std::string name :
       {"simulate", "pdmp", "shatter", "stationary", "moments", "pde", "converge",
        "sweep-check"})
    CHECK(cli::mode_name(cli::parse_mode(name)) == name);
  CHECK_THROWS_AS(cli::parse_mode("bogus"), ConfigError);
}

TEST_CASE("report consolidates summaries") {
  const fs::path dir = temp_dir("report");
  CHECK(cli::report({}, dir / "empty") == 0);
  const std::string empty_csv = slurp(dir / "empty" / "report.csv");
  CHECK(empty_csv ==
        "run,mode,kernel,alpha,mean_log,verdict,metric,runtime_seconds,seed\n");

  const json cfg = {{"mode", "moments"},
                    {"seed", 7},
                    {"kernel", {{"family", "power_law"}, {"beta", 1.0}}},
                    {"alpha", 1.0},
                    {"n", 2}};
  CHECK(cli::run(cli::config_from_json(cfg), dir / "r1") == 0);
  CHECK(cli::report({dir / "r1" / "summary.json"}, dir / "rep") == 0);
  const std::string csv = slurp(dir / "rep" / "report.csv");
  CHECK(csv.find("moments") != std::string::npos);

  std::ofstream junk(dir / "junk.json");
  junk << "{\"not\": \"a summary\"}";
  junk.close();
  CHECK_THROWS_AS(cli::report({dir / "junk.json"}, dir / "rep2"), ConfigError);
}

TEST_CASE("a converge run that has not converged flags the disagreement") {
  // One early checkpoint deep in the transient: the analytic verdict says
  // self-similar but the empirical distances are still large, so the run
  // must exit 3 and mark the disagreement.
  const fs::path dir = temp_dir("disagree");
  const json cfg = {{"mode", "converge"},
                    {"seed", 42},
                    {"kernel", {{"family", "power_law"}, {"beta", 1.0}}},
                    {"alpha", 1.0},
                    {"n_paths", 2000},
                    {"x0", 1.0},
                    {"observe_times", {0.2}},
                    {"grid", {{"x_min", 1e-4}, {"x_max", 50.0}, {"n_cells", 64}}},
                    {"pde_grid", {{"x_min", 1e-4}, {"x_max", 50.0}, {"n_cells", 128}}},
                    {"pde_x0", 5.0}};
  CHECK(cli::run(cli::config_from_json(cfg), dir) == 3);
  const json s = read_summary(dir);
  CHECK(s["verdict"] == "disagreement");
  CHECK(s["verdict_agreement"] == false);
  CHECK(s["verdict_analytic"] == "self-similar");
}

TEST_CASE("ensemble runs can export snapshot-format densities") {
  const fs::path dir = temp_dir("density");
  const json cfg = {{"mode", "pdmp"},
                    {"seed", 5},
                    {"kernel", {{"family", "power_law"}, {"beta", 1.0}}},
                    {"alpha", 1.0},
                    {"n_paths", 2000},
                    {"x0", 1.0},
                    {"observe_times", {1.0, 3.0}},
                    {"grid", {{"x_min", 1e-3}, {"x_max", 30.0}, {"n_cells", 32}}}};
  CHECK(cli::run(cli::config_from_json(cfg), dir) == 0);
  const std::string density = slurp(dir / "density.csv");
  CHECK(density.rfind("t,cell_center,mass\n", 0) == 0);
  // 2 observation times x 32 cells + header
  CHECK(std::count(density.begin(), density.end(), '\n') == 65);
}

TEST_CASE("identical config and seed give identical report metric columns") {
  const fs::path dir = temp_dir("repeat");
  const json cfg = {{"mode", "moments"},
                    {"seed", 7},
                    {"kernel", {{"family", "power_law"}, {"beta", 1.0}}},
                    {"alpha", 1.0},
                    {"n", 3}};
  CHECK(cli::run(cli::config_from_json(cfg), dir / "r1") == 0);
  CHECK(cli::run(cli::config_from_json(cfg), dir / "r2") == 0);
  CHECK(cli::report({dir / "r1" / "summary.json", dir / "r2" / "summary.json"},
                    dir / "rep") == 0);
  std::istringstream csv(slurp(dir / "rep" / "report.csv"));
  std::string header, row1, row2;
  std::getline(csv, header);
  std::getline(csv, row1);
  std::getline(csv, row2);
  // Drop the run-name and runtime columns; everything else matches bitwise.
  auto metric_part = [](const std::string& row) {
    const auto first = row.find(',');
    const auto last_comma = row.rfind(',');
    const auto runtime_comma = row.rfind(',', last_comma - 1);
    return row.substr(first, runtime_comma - first);
  };
  CHECK(metric_part(row1) == metric_part(row2));
}

TEST_CASE("fmt_g17 gives full-precision decimal") {
  const double v = 0.1234567890123456789;
  CHECK(cli::fmt_g17(v) == "0.12345678901234568");
  CHECK(std::stod(cli::fmt_g17(1.0 / 3.0)) == 1.0 / 3.0);
}
