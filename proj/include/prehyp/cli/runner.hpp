#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "prehyp/cli/config.hpp"

namespace prehyp::cli {

using Json = nlohmann::ordered_json;

/// Subcommands accepted by run(); `convergence` takes one of convergence_targets().
const std::vector<std::string>& subcommand_names();
const std::vector<std::string>& convergence_targets();

struct RunResult {
  Json report;   // deterministic: resolved scenario, results, pass flags
  Json timings;  // wall-clock seconds per step, kept out of the report
  std::map<std::string, std::string> csv;  // file name -> contents (only when "csv" is requested)
  bool pass = false;
};

/// Runs one subcommand. `target` names the ladder subject for `convergence`.
/// Throws ConfigError for unusable configs; numerical tolerances only set `pass`.
RunResult run(const std::string& subcommand, const std::optional<std::string>& target, const ScenarioConfig& config,
              std::optional<std::uint64_t> seed = std::nullopt);

/// The resolved configuration as JSON (echoed in every report).
Json echo(const ScenarioConfig& config);

/// log2(coarse / fine); empty when both lie below `roundoff` (converged to rounding).
std::optional<double> observed_order(double coarse, double fine, double roundoff);

/// Writes report.json, timings.json and any CSV dumps into `directory`.
void write_outputs(const RunResult& result, const std::filesystem::path& directory);

}  // namespace prehyp::cli
