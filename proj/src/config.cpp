#include "qpc/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "qpc/format.hpp"

namespace qpc {

namespace {

struct KeyBinding {
  std::string key;
  std::function<void(ScenarioConfig&, std::string_view)> set;
  std::function<std::optional<std::string>(const ScenarioConfig&)> get;
};

double to_double(std::string_view key, std::string_view value) {
  try {
    return parse_double(value);
  } catch (const std::invalid_argument&) {
    throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(value) + "'");
  }
}

std::uint64_t to_uint(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty()) {
    throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" +
                      std::string(value) + "'");
  }
  return out;
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "no" || value == "0") return false;
  throw ConfigError(std::string(key) + ": expected true or false, got '" + std::string(value) + "'");
}

FitModelKind parse_fit_model(std::string_view value) {
  for (auto k : {FitModelKind::kTriangleDip, FitModelKind::kSinusoid, FitModelKind::kQuantumFringe}) {
    if (fit_model_name(k) == value) return k;
  }
  throw ConfigError("fit.model: unknown model '" + std::string(value) +
                    "' (expected triangle-dip, sinusoid or quantum-fringe)");
}

KeyBinding real(std::string key, double ScenarioConfig::*field) {
  return {key,
          [key, field](ScenarioConfig& c, std::string_view v) { c.*field = to_double(key, v); },
          [field](const ScenarioConfig& c) { return std::optional(format_double(c.*field)); }};
}

template <class Accessor>
KeyBinding nested_real(std::string key, Accessor access) {
  return {key,
          [key, access](ScenarioConfig& c, std::string_view v) { access(c) = to_double(key, v); },
          [access](const ScenarioConfig& c) {
            return std::optional(format_double(access(c)));
          }};
}

template <class Accessor>
KeyBinding optional_real(std::string key, Accessor access) {
  return {key,
          [key, access](ScenarioConfig& c, std::string_view v) { access(c) = to_double(key, v); },
          [access](const ScenarioConfig& c) -> std::optional<std::string> {
            const auto& o = access(c);
            if (!o) return std::nullopt;
            return format_double(*o);
          }};
}

template <class Accessor>
KeyBinding sweep_real(std::string key, Accessor access) {
  return {key,
          [key, access](ScenarioConfig& c, std::string_view v) {
            if (!c.sweep) c.sweep = default_sweep(c.scenario);
            access(*c.sweep) = to_double(key, v);
          },
          [access](const ScenarioConfig& c) -> std::optional<std::string> {
            if (!c.sweep) return std::nullopt;
            return format_double(access(*c.sweep));
          }};
}

const std::vector<KeyBinding>& bindings() {
  static const std::vector<KeyBinding> table = [] {
    std::vector<KeyBinding> t;
    t.push_back({"scenario",
                 [](ScenarioConfig& c, std::string_view v) { c.scenario = parse_scenario(v); },
                 [](const ScenarioConfig& c) {
                   return std::optional(std::string(scenario_name(c.scenario)));
                 }});
    t.push_back({"seed",
                 [](ScenarioConfig& c, std::string_view v) { c.seed = to_uint("seed", v); },
                 [](const ScenarioConfig& c) { return std::optional(std::to_string(c.seed)); }});
    t.push_back({"out", [](ScenarioConfig& c, std::string_view v) { c.out_dir = std::string(v); },
                 [](const ScenarioConfig& c) { return std::optional(c.out_dir); }});
    t.push_back({"svg", [](ScenarioConfig& c, std::string_view v) { c.svg = to_bool("svg", v); },
                 [](const ScenarioConfig& c) {
                   return std::optional(std::string(c.svg ? "true" : "false"));
                 }});
    t.push_back(optional_real("epsilon", [](auto& c) -> auto& { return c.epsilon; }));

    t.push_back(nested_real("material.n_core", [](auto& c) -> auto& { return c.material.n_core; }));
    t.push_back(nested_real("material.n_clad", [](auto& c) -> auto& { return c.material.n_clad; }));
    t.push_back(nested_real("material.n_air", [](auto& c) -> auto& { return c.material.n_air; }));
    t.push_back(nested_real("material.r14", [](auto& c) -> auto& { return c.material.r14; }));
    t.push_back(nested_real("material.wavelength", [](auto& c) -> auto& { return c.material.wavelength; }));

    t.push_back(nested_real("coupler.gap", [](auto& c) -> auto& { return c.coupler.gap; }));
    t.push_back(nested_real("coupler.length", [](auto& c) -> auto& { return c.coupler.length; }));
    t.push_back(nested_real("coupler.kappa0", [](auto& c) -> auto& { return c.coupler.kappa0; }));
    t.push_back(nested_real("coupler.gamma", [](auto& c) -> auto& { return c.coupler.gamma; }));
    t.push_back(nested_real("coupler.phase_offset", [](auto& c) -> auto& { return c.coupler.phase_offset; }));

    t.push_back(nested_real("shifter.length", [](auto& c) -> auto& { return c.shifter.length; }));
    t.push_back(nested_real("shifter.v_pi", [](auto& c) -> auto& { return c.shifter.v_pi; }));
    t.push_back(optional_real("shifter.electrode_gap", [](auto& c) -> auto& { return c.shifter.electrode_gap; }));

    t.push_back(nested_real("loss.propagation_db_per_cm", [](auto& c) -> auto& { return c.counting.losses.propagation_db_per_cm; }));
    t.push_back(nested_real("loss.facet_coupling_db", [](auto& c) -> auto& { return c.counting.losses.facet_coupling_db; }));
    t.push_back(nested_real("loss.chip_internal_db", [](auto& c) -> auto& { return c.counting.losses.chip_internal_db; }));

    t.push_back(nested_real("counting.pair_rate", [](auto& c) -> auto& { return c.counting.pair_rate; }));
    t.push_back(nested_real("counting.integration_time", [](auto& c) -> auto& { return c.counting.integration_time; }));
    t.push_back(nested_real("counting.coincidence_window", [](auto& c) -> auto& { return c.counting.coincidence_window; }));
    t.push_back(nested_real("detector1.efficiency", [](auto& c) -> auto& { return c.counting.detectors[0].efficiency; }));
    t.push_back(nested_real("detector1.dark_rate", [](auto& c) -> auto& { return c.counting.detectors[0].dark_rate; }));
    t.push_back(nested_real("detector2.efficiency", [](auto& c) -> auto& { return c.counting.detectors[1].efficiency; }));
    t.push_back(nested_real("detector2.dark_rate", [](auto& c) -> auto& { return c.counting.detectors[1].dark_rate; }));

    t.push_back(sweep_real("sweep.start", [](auto& s) -> auto& { return s.start; }));
    t.push_back(sweep_real("sweep.stop", [](auto& s) -> auto& { return s.stop; }));
    t.push_back(sweep_real("sweep.step", [](auto& s) -> auto& { return s.step; }));

    t.push_back(real("hom.v_cap", &ScenarioConfig::v_cap));
    t.push_back(real("hom.coherence_time", &ScenarioConfig::coherence_time));
    t.push_back(real("fringe.tm_background", &ScenarioConfig::tm_background));
    t.push_back(optional_real("reflection.reflectance", [](auto& c) -> auto& { return c.reflectance; }));
    t.push_back(real("reflection.delta_phi", &ScenarioConfig::delta_phi));

    t.push_back({"fit.input", [](ScenarioConfig& c, std::string_view v) { c.fit_input = std::string(v); },
                 [](const ScenarioConfig& c) -> std::optional<std::string> {
                   if (c.fit_input.empty()) return std::nullopt;
                   return c.fit_input;
                 }});
    t.push_back({"fit.model",
                 [](ScenarioConfig& c, std::string_view v) { c.fit_model = parse_fit_model(v); },
                 [](const ScenarioConfig& c) {
                   return std::optional(std::string(fit_model_name(c.fit_model)));
                 }});
    t.push_back(optional_real("fit.period_hint", [](auto& c) -> auto& { return c.fit_period_hint; }));
    return t;
  }();
  return table;
}

void flatten(const YAML::Node& node, const std::string& prefix,
             std::vector<std::pair<std::string, std::string>>& out) {
  if (node.IsMap()) {
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      flatten(kv.second, prefix.empty() ? key : prefix + "." + key, out);
    }
  } else if (node.IsScalar()) {
    out.emplace_back(prefix, node.Scalar());
  } else if (node.IsNull()) {
    throw ConfigError(prefix + ": missing value");
  } else {
    throw ConfigError(prefix + ": lists are not supported");
  }
}

void check(bool ok, const std::string& key, const std::string& constraint) {
  if (!ok) throw ConfigError(key + ": must " + constraint);
}

bool efficiency(double x) { return x > 0.0 && x <= 1.0; }

}  // namespace

std::string_view scenario_name(Scenario s) {
  switch (s) {
    case Scenario::kHomDip: return "hom-dip";
    case Scenario::kClassicalFringe: return "classical-fringe";
    case Scenario::kQuantumFringe: return "quantum-fringe";
    case Scenario::kCouplerDesign: return "coupler-design";
    case Scenario::kReflectionAnalysis: return "reflection-analysis";
    case Scenario::kFit: return "fit";
  }
  return "unknown";
}

const std::vector<Scenario>& all_scenarios() {
  static const std::vector<Scenario> list = {
      Scenario::kHomDip,        Scenario::kClassicalFringe,     Scenario::kQuantumFringe,
      Scenario::kCouplerDesign, Scenario::kReflectionAnalysis, Scenario::kFit};
  return list;
}

Scenario parse_scenario(std::string_view name) {
  for (auto s : all_scenarios()) {
    if (scenario_name(s) == name) return s;
  }
  throw ConfigError("scenario: unknown scenario '" + std::string(name) + "'");
}

std::string_view fit_model_name(FitModelKind k) {
  switch (k) {
    case FitModelKind::kTriangleDip: return "triangle-dip";
    case FitModelKind::kSinusoid: return "sinusoid";
    case FitModelKind::kQuantumFringe: return "quantum-fringe";
  }
  return "unknown";
}

std::vector<double> SweepRange::values() const {
  if (!(step > 0.0) || !(stop >= start)) throw ConfigError("sweep: needs step > 0 and stop >= start");
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = start + static_cast<double>(i) * step;
  return v;
}

SweepRange default_sweep(Scenario s) {
  switch (s) {
    case Scenario::kHomDip: return {-300.0, 300.0, 20.0};
    case Scenario::kClassicalFringe:
    case Scenario::kQuantumFringe: return {0.0, 26.0, 0.5};
    case Scenario::kCouplerDesign: return {0.0, 300.0, 1.0};
    case Scenario::kReflectionAnalysis: return {0.0, 2.0 * kPi, kPi / 36.0};
    case Scenario::kFit: return {0.0, 0.0, 1.0};
  }
  return {};
}

double ScenarioConfig::resolved_epsilon() const {
  return epsilon ? *epsilon : coupling_ratio(coupler);
}

double ScenarioConfig::resolved_reflectance() const {
  return reflectance ? *reflectance : fresnel_reflectance(material.n_core, material.n_air).reflectance;
}

SweepRange ScenarioConfig::resolved_sweep() const { return sweep ? *sweep : default_sweep(scenario); }

void ScenarioConfig::validate() const {
  if (epsilon) check(*epsilon >= 0.0 && *epsilon <= 1.0, "epsilon", "lie in [0, 1]");
  check(material.n_core >= 1.0, "material.n_core", "be >= 1");
  check(material.n_clad >= 1.0, "material.n_clad", "be >= 1");
  check(material.n_air >= 1.0, "material.n_air", "be >= 1");
  check(material.r14 > 0.0, "material.r14", "be > 0");
  check(material.wavelength > 0.0, "material.wavelength", "be > 0");
  check(coupler.gap > 0.0, "coupler.gap", "be > 0");
  check(coupler.length >= 0.0, "coupler.length", "be >= 0");
  check(coupler.kappa0 > 0.0, "coupler.kappa0", "be > 0");
  check(coupler.gamma >= 0.0, "coupler.gamma", "be >= 0");
  check(std::isfinite(coupler.phase_offset), "coupler.phase_offset", "be finite");
  check(shifter.length > 0.0, "shifter.length", "be > 0");
  check(shifter.v_pi > 0.0, "shifter.v_pi", "be > 0");
  if (shifter.electrode_gap) check(*shifter.electrode_gap > 0.0, "shifter.electrode_gap", "be > 0");
  const auto& loss = counting.losses;
  check(loss.propagation_db_per_cm >= 0.0, "loss.propagation_db_per_cm", "be >= 0");
  check(loss.facet_coupling_db >= 0.0, "loss.facet_coupling_db", "be >= 0");
  check(loss.chip_internal_db >= 0.0, "loss.chip_internal_db", "be >= 0");
  check(counting.pair_rate > 0.0, "counting.pair_rate", "be > 0");
  check(counting.integration_time > 0.0, "counting.integration_time", "be > 0");
  check(counting.coincidence_window > 0.0, "counting.coincidence_window", "be > 0");
  check(efficiency(counting.detectors[0].efficiency), "detector1.efficiency", "lie in (0, 1]");
  check(efficiency(counting.detectors[1].efficiency), "detector2.efficiency", "lie in (0, 1]");
  check(counting.detectors[0].dark_rate >= 0.0, "detector1.dark_rate", "be >= 0");
  check(counting.detectors[1].dark_rate >= 0.0, "detector2.dark_rate", "be >= 0");
  if (sweep) {
    check(sweep->step > 0.0, "sweep.step", "be > 0");
    check(sweep->stop >= sweep->start, "sweep.stop", "be >= sweep.start");
  }
  check(v_cap >= 0.0 && v_cap <= 1.0, "hom.v_cap", "lie in [0, 1]");
  check(coherence_time > 0.0, "hom.coherence_time", "be > 0");
  check(tm_background >= 0.0, "fringe.tm_background", "be >= 0");
  if (reflectance) check(*reflectance >= 0.0 && *reflectance < 1.0, "reflection.reflectance", "lie in [0, 1)");
  check(std::isfinite(delta_phi), "reflection.delta_phi", "be finite");
  if (fit_period_hint) check(*fit_period_hint > 0.0, "fit.period_hint", "be > 0");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& b : bindings()) k.push_back(b.key);
    return k;
  }();
  return keys;
}

void set_config_value(ScenarioConfig& cfg, std::string_view key, std::string_view value) {
  for (const auto& b : bindings()) {
    if (b.key == key) {
      b.set(cfg, value);
      return;
    }
  }
  throw ConfigError("unknown key '" + std::string(key) + "'");
}

void apply_override(ScenarioConfig& cfg, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("override '" + std::string(assignment) + "' is not of the form key=value");
  }
  set_config_value(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

ScenarioConfig parse_config(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  ScenarioConfig cfg;
  if (root.IsNull()) return cfg;
  if (!root.IsMap()) throw ConfigError("configuration must be a key-value map");

  std::vector<std::pair<std::string, std::string>> entries;
  flatten(root, "", entries);
  // The scenario decides sweep defaults, so it is applied first.
  for (const auto& [k, v] : entries) {
    if (k == "scenario") set_config_value(cfg, k, v);
  }
  for (const auto& [k, v] : entries) {
    if (k != "scenario") set_config_value(cfg, k, v);
  }
  cfg.validate();
  return cfg;
}

std::vector<std::pair<std::string, std::string>> config_entries(const ScenarioConfig& cfg) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& b : bindings()) {
    if (auto value = b.get(cfg)) out.emplace_back(b.key, std::move(*value));
  }
  return out;
}

std::string serialize_config(const ScenarioConfig& cfg) {
  std::ostringstream os;
  for (const auto& [key, value] : config_entries(cfg)) {
    // Quote strings so YAML reads them back verbatim.
    YAML::Emitter e;
    e << YAML::DoubleQuoted << value;
    os << key << ": " << e.c_str() << '\n';
  }
  return os.str();
}

}  // namespace qpc
