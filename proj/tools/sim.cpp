// sim: runs one simulation scenario and writes its CSV, JSON and SVG output.
//
//   sim <scenario> [--config file.yaml] [--set key=value ...] [--out dir] [--seed n]
//
// Flags override values from the config file. Exit status: 0 on success,
// 2 for configuration errors, 3 for I/O errors, 1 for anything else.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qpc/config.hpp"
#include "qpc/scenario.hpp"

namespace {

constexpr int kConfigFailure = 2;
constexpr int kIoFailure = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qpc::IoError("cannot read config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum photonic circuit simulator"};
  std::string scenario;
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool print_schema = false;
  bool list_keys = false;

  std::string names;
  for (auto s : qpc::all_scenarios()) names += (names.empty() ? "" : ", ") + std::string(qpc::scenario_name(s));
  app.add_option("scenario", scenario, "One of: " + names);
  app.add_option("-c,--config", config_path, "YAML config file");
  app.add_option("-s,--set", overrides, "Override a config key (key=value)")->take_all();
  auto* out_opt = app.add_option("-o,--out", out_dir, "Output directory");
  auto* seed_opt = app.add_option("--seed", seed, "Random seed");
  app.add_flag("--print-schema", print_schema, "Print the summary JSON schema and exit");
  app.add_flag("--list-keys", list_keys, "Print the accepted config keys and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigFailure;
  }

  if (print_schema) {
    std::cout << qpc::summary_schema().dump(2) << '\n';
    return 0;
  }
  if (list_keys) {
    for (const auto& k : qpc::config_keys()) std::cout << k << '\n';
    return 0;
  }

  try {
    qpc::ScenarioConfig cfg;
    if (!config_path.empty()) cfg = qpc::parse_config(read_file(config_path));
    if (!scenario.empty()) cfg.scenario = qpc::parse_scenario(scenario);
    for (const auto& o : overrides) qpc::apply_override(cfg, o);
    if (*out_opt) cfg.out_dir = out_dir;
    if (*seed_opt) cfg.seed = seed;
    if (scenario.empty() && config_path.empty()) {
      throw qpc::ConfigError("scenario: must be given on the command line or in the config");
    }

    const auto art = qpc::run_scenario(cfg);
    std::cout << "wrote";
    for (const auto& [name, _] : art.files) std::cout << ' ' << name;
    std::cout << " to " << cfg.out_dir << '\n';
    const auto& results = art.summary["results"];
    if (results.contains("visibility") && results["visibility"].is_object()) {
      std::cout << "visibility: " << results["visibility"]["value"].dump() << '\n';
    }
    return 0;
  } catch (const qpc::ConfigError& e) {
    std::cerr << "sim: config error: " << e.what() << '\n';
    return kConfigFailure;
  } catch (const qpc::IoError& e) {
    std::cerr << "sim: I/O error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const std::exception& e) {
    std::cerr << "sim: error: " << e.what() << '\n';
    return 1;
  }
}
