#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fragsim/runner.hpp"

namespace {

int dispatch_run(const std::string& mode, const std::string& config_file,
                 const std::string& out_dir, int threads) {
  fragsim::cli::RunConfig cfg = fragsim::cli::load_config(config_file);
  if (fragsim::cli::mode_name(cfg.mode) != mode)
    throw fragsim::ConfigError("config mode '" + fragsim::cli::mode_name(cfg.mode) +
                               "' does not match subcommand '" + mode + "'");
  return fragsim::cli::run(cfg, out_dir, threads);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fragsim: homogeneous fragmentation simulator and diagnostics"};
  app.require_subcommand(1);

  const std::vector<std::string> modes = {"simulate", "pdmp",      "shatter",  "stationary",
                                          "moments",  "pde",       "converge", "sweep-check"};
  struct ModeArgs {
    std::string config;
    std::string out = "out";
    int threads = 1;
  };
  std::vector<ModeArgs> args(modes.size());
  for (std::size_t i = 0; i < modes.size(); ++i) {
    CLI::App* sub = app.add_subcommand(modes[i], "run the '" + modes[i] + "' pipeline");
    sub->add_option("--config", args[i].config, "JSON run configuration")->required();
    sub->add_option("--out", args[i].out, "output directory");
    sub->add_option("--threads", args[i].threads, "worker threads")->check(CLI::Range(1, 1024));
  }

  std::vector<std::string> summary_files;
  std::string report_out = "out";
  CLI::App* rep = app.add_subcommand("report", "consolidate run summaries into one table");
  rep->add_option("summaries", summary_files, "summary.json files");
  rep->add_option("--out", report_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (rep->parsed()) {
      std::vector<std::filesystem::path> paths(summary_files.begin(), summary_files.end());
      return fragsim::cli::report(paths, report_out);
    }
    for (std::size_t i = 0; i < modes.size(); ++i) {
      CLI::App* sub = app.get_subcommand(modes[i]);
      if (sub->parsed())
        return dispatch_run(modes[i], args[i].config, args[i].out, args[i].threads);
    }
    std::fprintf(stderr, "no subcommand selected\n");
    return 2;
  } catch (const fragsim::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const fragsim::NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
