#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "fragsim/kernel.hpp"

namespace fragsim::cli {

enum class Mode { simulate, pdmp, shatter, stationary, moments, pde, converge, sweep_check };

Mode parse_mode(const std::string& name);
std::string mode_name(Mode m);

/// Parsed, validated batch configuration. The seed is mandatory (no wall-clock
/// default); the FRAGSIM_SEED environment variable overrides the config value.
struct RunConfig {
  Mode mode = Mode::moments;
  std::uint64_t seed = 0;
  nlohmann::json raw;
  std::string config_hash;  // FNV-1a over the config bytes, for provenance
};

RunConfig load_config(const std::filesystem::path& file);
RunConfig config_from_json(const nlohmann::json& j, const std::string& hash = "inline");

Kernel kernel_from_json(const nlohmann::json& spec,
                        const std::filesystem::path& base_dir = ".");

/// Executes the configured pipeline, writing summary.json and the data CSVs
/// into out_dir. Returns 0 on success and 3 when a dichotomy verdict
/// disagreement is detected; throws ConfigError / NumericError otherwise
/// (mapped to exit codes 2 / 3 by the command-line front end).
int run(const RunConfig& cfg, const std::filesystem::path& out_dir, int threads = 1);

/// Consolidates run summaries into report.csv + report.txt under out_dir.
int report(const std::vector<std::filesystem::path>& summaries,
           const std::filesystem::path& out_dir);

/// Full-precision (17 significant digits) decimal formatting used in all CSVs.
std::string fmt_g17(double v);

}  // namespace fragsim::cli
