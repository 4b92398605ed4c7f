#include "qpc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include "qpc/device.hpp"
#include "qpc/error.hpp"
#include "qpc/experiment.hpp"
#include "qpc/fitting.hpp"
#include "qpc/format.hpp"
#include "qpc/interference.hpp"
#include "qpc/reflection.hpp"
#include "qpc/svg.hpp"

namespace qpc {

namespace {

using json = nlohmann::ordered_json;

constexpr double kObservedDegradation = 0.038;

struct Column {
  std::string name;
  std::vector<double> values;
};

std::string csv_text(const std::vector<Column>& columns) {
  std::ostringstream os;
  for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c].name;
  os << '\n';
  const std::size_t rows = columns.empty() ? 0 : columns.front().values.size();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      os << (c ? "," : "") << format_double(columns[c].values[r]);
    }
    os << '\n';
  }
  return os.str();
}

std::string sweep_csv(const SweepRecord& rec) {
  std::ostringstream os;
  write_csv(os, rec);
  return os.str();
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

unsigned worker_count() {
  return std::clamp(std::thread::hardware_concurrency(), 1u, 8u);
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

template <class Model>
json visibility_json(const FitResult<Model>& fit, VisibilityConvention convention) {
  const char* name = convention == VisibilityConvention::kDip ? "dip" : "fringe";
  if (!fit.stats.converged) return json{{"value", nullptr}, {"sigma", nullptr}, {"convention", name}};
  const auto v = extract_visibility(fit, convention);
  return json{{"value", v.value}, {"sigma", number_or_null(v.sigma)}, {"convention", name}};
}

template <class Model>
Column model_column(const Model& model, const std::vector<double>& xs) {
  Column c{"value", {}};
  for (double x : xs) c.values.push_back(model(x));
  return c;
}

std::vector<double> corrected_counts(const SweepRecord& rec) {
  std::vector<double> v;
  for (const auto& p : rec.points) v.push_back(p.corrected);
  return v;
}

std::vector<double> controls(const SweepRecord& rec) {
  std::vector<double> v;
  for (const auto& p : rec.points) v.push_back(p.control);
  return v;
}

CountingConfig seeded_counting(const ScenarioConfig& cfg) {
  CountingConfig counting = cfg.counting;
  counting.rng_seed = cfg.seed;
  return counting;
}

ShifterGeometry shifter_for(const ScenarioConfig& cfg) {
  return cfg.shifter.electrode_gap ? cfg.shifter : calibrated(cfg.shifter, cfg.material);
}

ScenarioArtifacts hom_dip(const ScenarioConfig& cfg) {
  ScenarioArtifacts out;
  const double eps = cfg.resolved_epsilon();
  const auto delays = cfg.resolved_sweep().values();
  const auto model = SpectralModel::triangular(cfg.coherence_time);
  const Curve profile = hom_dip_profile(delays, eps, model, cfg.v_cap);
  const double shoulder_prob = distinguishable_coincidence_probability(eps);

  const ProbabilityFn prob = [&](double delay_um) {
    const double g = overlap_kernel(delay_um_to_seconds(delay_um), model);
    return shoulder_prob * (1.0 - cfg.v_cap * hom_visibility(eps) * g);
  };
  const SweepRecord rec = simulate_sweep(delays, prob, seeded_counting(cfg), worker_count());
  const auto fit = fit_triangular_dip(rec);

  const auto counts = corrected_counts(rec);
  const auto min_it = std::min_element(counts.begin(), counts.end());
  const auto fine = linspace(delays.front(), delays.back(), 601);

  out.summary["results"] = {
      {"epsilon", eps},
      {"model_visibility", hom_visibility(eps)},
      {"expected_visibility", cfg.v_cap * hom_visibility(eps)},
      {"visibility", visibility_json(fit, VisibilityConvention::kDip)},
      {"dip_minimum_delay_um", delays[static_cast<std::size_t>(min_it - counts.begin())]},
      {"fitted_center_um", fit.model.center},
      {"fitted_full_width_um", 2.0 * fit.model.half_width},
      {"model_full_width_um", dip_full_width_um(cfg.coherence_time)},
      {"coherence_length_um", coherence_length_um(cfg.coherence_time, cfg.material.n_core)},
      {"fit", to_json(fit)},
  };
  out.summary["reference_values"] = {
      {"visibility", 0.949},
      {"visibility_second_device", 0.987},
      {"visibility_third_device", 0.986},
      {"dip_full_width_um", 440.0},
      {"coherence_time_ps", 0.73},
      {"coherence_length_um", 64.1},
  };

  out.files["sweep.csv"] = sweep_csv(rec);
  out.files["model.csv"] = csv_text({{"control", fine}, model_column(fit.model, fine)});
  out.files["profile.csv"] = csv_text({{"control", profile.control}, {"value", profile.value}});
  if (cfg.svg) {
    out.files["plot.svg"] = line_plot_svg(
        {{"corrected coincidences", delays, counts, true},
         {"inverse triangular fit", fine, model_column(fit.model, fine).values, false}},
        "HOM dip", "delay (um)", "coincidences");
  }
  return out;
}

ScenarioArtifacts classical_fringe_scenario(const ScenarioConfig& cfg) {
  ScenarioArtifacts out;
  const double eps = cfg.resolved_epsilon();
  const auto shifter = shifter_for(cfg);
  const auto volts = cfg.resolved_sweep().values();
  std::vector<double> thetas;
  for (double v : volts) thetas.push_back(phase_from_voltage(v, shifter, cfg.material));
  const auto [out1, out2] = classical_fringe(eps, thetas);

  // Noiseless intensities; a uniform nominal error keeps the fit well scaled.
  auto fit_output = [&](const Curve& c) {
    lsq::Observations obs{thetas, c.value, std::vector<double>(thetas.size(), 1e-3)};
    return fit_sinusoid(obs, 2.0 * kPi);
  };
  const auto fit1 = fit_output(out1);
  const auto fit2 = fit_output(out2);

  auto output_json = [](const Curve& c, const FitResult<SinusoidModel>& fit) {
    return json{{"visibility", visibility_json(fit, VisibilityConvention::kFringe)},
                {"sampled_visibility", curve_visibility(c.value, VisibilityConvention::kFringe)},
                {"fit", to_json(fit)}};
  };
  out.summary["results"] = {
      {"epsilon", eps},
      {"electrode_gap_m", *shifter.electrode_gap},
      {"theta_at_v_pi", phase_from_voltage(shifter.v_pi, shifter, cfg.material)},
      {"output1", output_json(out1, fit1)},
      {"output2", output_json(out2, fit2)},
  };
  out.summary["reference_values"] = {
      {"output1_visibility", 0.799},
      {"output2_visibility", 0.986},
      {"v_pi", 13.0},
  };

  out.files["fringe.csv"] =
      csv_text({{"control", volts}, {"theta", thetas}, {"output1", out1.value}, {"output2", out2.value}});
  if (cfg.svg) {
    out.files["plot.svg"] = line_plot_svg({{"output 1", volts, out1.value, false},
                                           {"output 2", volts, out2.value, false}},
                                          "Classical MZI fringe", "voltage (V)", "relative intensity");
  }
  return out;
}

ScenarioArtifacts quantum_fringe_scenario(const ScenarioConfig& cfg) {
  ScenarioArtifacts out;
  const double eps = cfg.resolved_epsilon();
  const auto shifter = shifter_for(cfg);
  const auto volts = cfg.resolved_sweep().values();
  const double bg = cfg.tm_background;

  // Normalized so that the largest coincidence probability stays <= 1.
  const ProbabilityFn prob = [&](double v) {
    return quantum_fringe_value(eps, phase_from_voltage(v, shifter, cfg.material), bg) / (1.0 + bg);
  };
  const SweepRecord rec = simulate_sweep(volts, prob, seeded_counting(cfg), worker_count());

  lsq::Observations obs = observations_from(rec);
  std::vector<double> thetas;
  for (double v : volts) thetas.push_back(phase_from_voltage(v, shifter, cfg.material));
  obs.x = thetas;
  const auto exact = fit_quantum_fringe(obs);
  const auto sine = fit_sinusoid(obs, kPi);

  std::vector<double> theory;
  for (double t : thetas) theory.push_back(quantum_fringe_value(eps, t, bg) / (1.0 + bg));

  out.summary["results"] = {
      {"epsilon", eps},
      {"electrode_gap_m", *shifter.electrode_gap},
      {"model_visibility", curve_visibility(theory, VisibilityConvention::kFringe)},
      {"visibility", visibility_json(exact, VisibilityConvention::kFringe)},
      {"sinusoid_visibility", visibility_json(sine, VisibilityConvention::kFringe)},
      {"fit", to_json(exact)},
      {"sinusoid_fit", to_json(sine)},
  };
  out.summary["reference_values"] = {
      {"visibility", 0.844},
      {"epsilon", 0.3},
  };

  const auto fine_theta = linspace(thetas.front(), thetas.back(), 521);
  const auto fine_volts = linspace(volts.front(), volts.back(), 521);
  out.files["sweep.csv"] = sweep_csv(rec);
  out.files["theory.csv"] = csv_text({{"control", volts}, {"theta", thetas}, {"probability", theory}});
  if (cfg.svg) {
    out.files["plot.svg"] =
        line_plot_svg({{"corrected coincidences", volts, corrected_counts(rec), true},
                       {"exact fringe fit", fine_volts, model_column(exact.model, fine_theta).values, false}},
                      "Two-photon MZI fringe", "voltage (V)", "coincidences");
  }
  return out;
}

double first_half_crossing(const CouplerGeometry& geom) {
  const double kappa = coupling_strength(geom);
  // sin^2 reaches 1/2 at kappa L + offset = pi/4 + k pi/2.
  double arg = kPi / 4.0 - geom.phase_offset;
  arg -= std::floor(arg / (kPi / 2.0)) * (kPi / 2.0);
  return arg / kappa;
}

ScenarioArtifacts coupler_design(const ScenarioConfig& cfg) {
  ScenarioArtifacts out;
  const auto lengths = cfg.resolved_sweep().values();
  std::vector<double> eps;
  for (double l : lengths) {
    CouplerGeometry g = cfg.coupler;
    g.length = l;
    eps.push_back(coupling_ratio(g));
  }

  json crossing = nullptr;
  for (std::size_t i = 1; i < lengths.size(); ++i) {
    const double a = eps[i - 1] - 0.5;
    const double b = eps[i] - 0.5;
    if (a == 0.0) {
      crossing = lengths[i - 1];
      break;
    }
    if (a * b < 0.0 || b == 0.0) {
      crossing = lengths[i - 1] + (lengths[i] - lengths[i - 1]) * a / (a - b);
      break;
    }
  }

  auto anchor_ratio = [&](double gap, double length) {
    CouplerGeometry g = cfg.coupler;
    g.gap = gap;
    g.length = length;
    return coupling_ratio(g);
  };
  out.summary["results"] = {
      {"gap_um", cfg.coupler.gap},
      {"kappa_rad_per_um", coupling_strength(cfg.coupler)},
      {"half_crossing_length_um", first_half_crossing(cfg.coupler)},
      {"sweep_half_crossing_length_um", crossing},
      {"epsilon_at_length", coupling_ratio(cfg.coupler)},
      {"anchor_epsilon_gap_2_5_length_140", anchor_ratio(2.5, 140.0)},
      {"anchor_epsilon_gap_3_0_length_255", anchor_ratio(3.0, 255.0)},
  };
  out.summary["reference_values"] = {
      {"half_crossing_length_um_gap_2_5", 140.0},
      {"epsilon_gap_3_0_length_255", 0.3},
  };

  out.files["coupler.csv"] = csv_text({{"length_um", lengths}, {"epsilon", eps}});
  if (cfg.svg) {
    out.files["plot.svg"] = line_plot_svg({{"coupling ratio", lengths, eps, false}},
                                          "Directional coupler", "coupling length (um)", "epsilon");
  }
  return out;
}

ScenarioArtifacts reflection_analysis(const ScenarioConfig& cfg) {
  ScenarioArtifacts out;
  auto params = ReflectionParams::from_device(cfg.material, cfg.counting.losses, cfg.counting.pair_rate,
                                              cfg.delta_phi, cfg.counting.detectors[0].efficiency,
                                              cfg.counting.detectors[1].efficiency);
  params.reflectance = cfg.resolved_reflectance();
  params.transmittance = 1.0 - params.reflectance;
  params.validate();

  const auto phases = cfg.resolved_sweep().values();
  std::vector<double> dip, shoulder, degradation;
  for (double phi : phases) {
    auto p = params;
    p.delta_phi = phi;
    dip.push_back(dip_coincidence_rate(p));
    shoulder.push_back(shoulder_coincidence_rate(p));
    degradation.push_back(visibility_degradation(p));
  }
  const auto range = degradation_range(params);
  json observed_phase = nullptr;
  if (kObservedDegradation >= range.min && kObservedDegradation <= range.max) {
    observed_phase = phase_for_degradation(params, kObservedDegradation);
  }

  out.summary["results"] = {
      {"reflectance", params.reflectance},
      {"transmittance", params.transmittance},
      {"eta_c", params.eta_c},
      {"eta", params.eta},
      {"worst_degradation", range.max},
      {"best_degradation", range.min},
      {"degradation_at_delta_phi", visibility_degradation(params)},
      {"dip_rate_hz", dip_coincidence_rate(params)},
      {"shoulder_rate_hz", shoulder_coincidence_rate(params)},
      {"delta_phi_for_observed_degradation", observed_phase},
  };
  out.summary["reference_values"] = {
      {"worst_degradation", 0.044},
      {"observed_degradation", kObservedDegradation},
      {"reflectance", 0.3},
  };

  out.files["reflection.csv"] = csv_text({{"delta_phi", phases},
                                          {"dip_rate", dip},
                                          {"shoulder_rate", shoulder},
                                          {"degradation", degradation}});
  if (cfg.svg) {
    out.files["plot.svg"] = line_plot_svg({{"visibility degradation", phases, degradation, false}},
                                          "Facet round-trip degradation", "delta phi (rad)",
                                          "degradation");
  }
  return out;
}

SweepRecord load_sweep(const std::string& path) {
  if (path.empty()) throw ConfigError("fit.input: must name a CSV file");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  try {
    return read_csv(in);
  } catch (const std::exception& e) {
    throw IoError("'" + path + "': " + e.what());
  }
}

ScenarioArtifacts fit_scenario(const ScenarioConfig& cfg) {
  ScenarioArtifacts out;
  const SweepRecord rec = load_sweep(cfg.fit_input);
  const auto obs = observations_from(rec);
  const auto xs = controls(rec);
  if (xs.empty()) throw IoError("'" + cfg.fit_input + "': no data rows");
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  const auto fine = linspace(*lo, *hi, 601);

  json results{{"model", fit_model_name(cfg.fit_model)}, {"points", rec.points.size()}};
  json reference = json::object();
  Column curve;
  switch (cfg.fit_model) {
    case FitModelKind::kTriangleDip: {
      const auto fit = fit_triangular_dip(obs);
      results["visibility"] = visibility_json(fit, VisibilityConvention::kDip);
      results["fit"] = to_json(fit);
      curve = model_column(fit.model, fine);
      reference = {{"visibility", 0.949}, {"dip_full_width_um", 440.0}};
      break;
    }
    case FitModelKind::kSinusoid: {
      const double hint = cfg.fit_period_hint ? *cfg.fit_period_hint : estimate_period(obs);
      const auto fit = fit_sinusoid(obs, hint);
      results["period_hint"] = hint;
      results["visibility"] = visibility_json(fit, VisibilityConvention::kFringe);
      results["fit"] = to_json(fit);
      curve = model_column(fit.model, fine);
      reference = {{"classical_output1_visibility", 0.799},
                   {"classical_output2_visibility", 0.986},
                   {"quantum_visibility", 0.844}};
      break;
    }
    case FitModelKind::kQuantumFringe: {
      const auto fit = fit_quantum_fringe(obs);
      results["visibility"] = visibility_json(fit, VisibilityConvention::kFringe);
      results["fit"] = to_json(fit);
      curve = model_column(fit.model, fine);
      reference = {{"visibility", 0.844}, {"epsilon", 0.3}};
      break;
    }
  }
  out.summary["results"] = std::move(results);
  out.summary["reference_values"] = std::move(reference);

  out.files["model.csv"] = csv_text({{"control", fine}, curve});
  if (cfg.svg) {
    out.files["plot.svg"] = line_plot_svg(
        {{"corrected counts", xs, corrected_counts(rec), true}, {"fit", fine, curve.values, false}},
        "Fit of " + cfg.fit_input, "control", "counts");
  }
  return out;
}

}  // namespace

ScenarioArtifacts compute_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  ScenarioArtifacts body;
  switch (cfg.scenario) {
    case Scenario::kHomDip: body = hom_dip(cfg); break;
    case Scenario::kClassicalFringe: body = classical_fringe_scenario(cfg); break;
    case Scenario::kQuantumFringe: body = quantum_fringe_scenario(cfg); break;
    case Scenario::kCouplerDesign: body = coupler_design(cfg); break;
    case Scenario::kReflectionAnalysis: body = reflection_analysis(cfg); break;
    case Scenario::kFit: body = fit_scenario(cfg); break;
  }

  // The output directory is left out so that runs differing only in where
  // they write produce identical summaries.
  json config = json::object();
  for (const auto& [key, value] : config_entries(cfg)) {
    if (key != "out") config[key] = value;
  }
  body.files["summary.json"] = "";
  json files = json::array();
  for (const auto& [name, _] : body.files) files.push_back(name);

  ScenarioArtifacts out;
  out.summary = {{"scenario", scenario_name(cfg.scenario)},
                 {"seed", cfg.seed},
                 {"config", std::move(config)},
                 {"results", std::move(body.summary["results"])},
                 {"reference_values", std::move(body.summary["reference_values"])},
                 {"files", std::move(files)}};
  out.files = std::move(body.files);
  out.files["summary.json"] = out.summary.dump(2) + "\n";
  return out;
}

ScenarioArtifacts run_scenario(const ScenarioConfig& cfg) {
  ScenarioArtifacts art = compute_scenario(cfg);
  namespace fs = std::filesystem;
  const fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw IoError("cannot create output directory '" + cfg.out_dir + "'");
  }
  for (const auto& [name, text] : art.files) {
    const fs::path path = dir / name;
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    os << text;
    os.flush();
    if (!os) throw IoError("cannot write '" + path.string() + "'");
  }
  return art;
}

const nlohmann::ordered_json& summary_schema() {
  static const json schema = [] {
    json scenarios = json::array();
    for (auto s : all_scenarios()) scenarios.push_back(scenario_name(s));
    const json nullable_number = {{"type", json::array({"number", "null"})}};
    return json{
        {"$schema", "https://json-schema.org/draft/2020-12/schema"},
        {"$id", "https://qpc.example/summary.schema.json"},
        {"title", "Scenario summary"},
        {"type", "object"},
        {"required", json::array({"scenario", "seed", "config", "results", "reference_values", "files"})},
        {"additionalProperties", false},
        {"properties",
         {{"scenario", {{"type", "string"}, {"enum", scenarios}}},
          {"seed", {{"type", "integer"}, {"minimum", 0}}},
          {"config", {{"type", "object"}, {"additionalProperties", {{"type", "string"}}}}},
          {"results",
           {{"type", "object"},
            {"properties",
             {{"visibility",
               {{"type", "object"},
                {"required", json::array({"value", "sigma", "convention"})},
                {"properties",
                 {{"value", nullable_number},
                  {"sigma", nullable_number},
                  {"convention", {{"type", "string"}, {"enum", json::array({"dip", "fringe"})}}}}}}},
              {"fit",
               {{"type", "object"},
                {"required", json::array({"model", "parameters", "standard_errors", "rss",
                                          "reduced_chi2", "iterations", "converged"})},
                {"properties",
                 {{"model", {{"type", "string"}}},
                  {"parameters", {{"type", "object"}, {"additionalProperties", {{"type", "number"}}}}},
                  {"standard_errors", {{"type", "object"}, {"additionalProperties", nullable_number}}},
                  {"rss", {{"type", "number"}}},
                  {"reduced_chi2", {{"type", "number"}}},
                  {"iterations", {{"type", "integer"}}},
                  {"converged", {{"type", "boolean"}}}}}}}}}}},
          {"reference_values", {{"type", "object"}, {"additionalProperties", {{"type", "number"}}}}},
          {"files",
           {{"type", "array"}, {"items", {{"type", "string"}}}, {"minItems", 1}}}}}};
  }();
  return schema;
}

}  // namespace qpc
