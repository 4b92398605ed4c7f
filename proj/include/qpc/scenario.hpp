// Scenario execution: runs one configured experiment end to end and produces
// its CSV curve(s), JSON summary and optional SVG plot.
#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "qpc/config.hpp"

namespace qpc {

/// Unreadable input or unwritable output.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ScenarioArtifacts {
  nlohmann::ordered_json summary;
  /// File name (relative to the output directory) -> contents. Includes
  /// summary.json.
  std::map<std::string, std::string> files;
};

/// Runs the scenario in memory. Deterministic for a given config.
/// Throws ConfigError for invalid configs and IoError for unreadable inputs.
ScenarioArtifacts compute_scenario(const ScenarioConfig& cfg);

/// compute_scenario, then writes every artifact under cfg.out_dir (created if
/// missing). Throws IoError when the directory or a file cannot be written.
ScenarioArtifacts run_scenario(const ScenarioConfig& cfg);

/// JSON Schema that every summary.json satisfies.
const nlohmann::ordered_json& summary_schema();

}  // namespace qpc
