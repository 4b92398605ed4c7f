// Scenario configuration: a YAML key-value document (flat dotted keys or the
// equivalent nested maps) with defaults for every field.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qpc/device.hpp"
#include "qpc/experiment.hpp"

namespace qpc {

/// Invalid or unknown configuration entry. The message names the key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Scenario {
  kHomDip,
  kClassicalFringe,
  kQuantumFringe,
  kCouplerDesign,
  kReflectionAnalysis,
  kFit,
};

std::string_view scenario_name(Scenario s);
/// Throws ConfigError for an unknown name.
Scenario parse_scenario(std::string_view name);
const std::vector<Scenario>& all_scenarios();

enum class FitModelKind { kTriangleDip, kSinusoid, kQuantumFringe };

std::string_view fit_model_name(FitModelKind k);

struct SweepRange {
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  /// start, start + step, ... up to stop (inclusive within 1e-9 steps).
  std::vector<double> values() const;
  bool operator==(const SweepRange&) const = default;
};

/// Default sweep per scenario: delay (um) for hom-dip, voltage (V) for the
/// fringes, coupling length (um) for coupler-design, facet phase (rad) for
/// reflection-analysis.
SweepRange default_sweep(Scenario s);

struct ScenarioConfig {
  Scenario scenario = Scenario::kHomDip;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  bool svg = true;

  /// When unset the coupling ratio comes from the coupler geometry.
  std::optional<double> epsilon;
  MaterialParams material;
  CouplerGeometry coupler;
  ShifterGeometry shifter;
  CountingConfig counting;
  std::optional<SweepRange> sweep;

  double v_cap = 0.949;
  double coherence_time = 0.73e-12;
  double tm_background = 0.0;

  /// When unset the Fresnel reflectance of the core/air facet is used.
  std::optional<double> reflectance;
  double delta_phi = 0.0;

  std::string fit_input;
  FitModelKind fit_model = FitModelKind::kTriangleDip;
  std::optional<double> fit_period_hint;

  double resolved_epsilon() const;
  double resolved_reflectance() const;
  SweepRange resolved_sweep() const;

  /// Throws ConfigError naming the first violated field.
  void validate() const;
  bool operator==(const ScenarioConfig&) const = default;
};

/// Every accepted key, in serialization order.
const std::vector<std::string>& config_keys();

/// Sets one field from its textual value. Throws ConfigError for unknown keys
/// or unparsable values.
void set_config_value(ScenarioConfig& cfg, std::string_view key, std::string_view value);

/// Applies a "key=value" override.
void apply_override(ScenarioConfig& cfg, std::string_view assignment);

/// Parses and validates a YAML document; omitted fields keep their defaults.
ScenarioConfig parse_config(std::string_view text);

/// (key, textual value) for every set field, in serialization order.
std::vector<std::pair<std::string, std::string>> config_entries(const ScenarioConfig& cfg);

/// Flat "key: value" YAML that parse_config reads back to an equal config.
std::string serialize_config(const ScenarioConfig& cfg);

}  // namespace qpc
