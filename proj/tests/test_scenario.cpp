#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "qpc/config.hpp"
#include "qpc/interference.hpp"
#include "qpc/scenario.hpp"
#include "schema_check.hpp"

using namespace qpc;
namespace fs = std::filesystem;

namespace {

ScenarioConfig config_for(Scenario s) {
  ScenarioConfig cfg;
  cfg.scenario = s;
  return cfg;
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("qpc_scenario_" + name);
  fs::remove_all(dir);
  return dir;
}

void expect_valid(const nlohmann::ordered_json& summary) {
  const auto errors = schema_check::validate(summary, summary_schema());
  for (const auto& e : errors) ADD_FAILURE() << e;
}

}  // namespace

TEST(Scenario, HomDipDefaults) {
  const auto art = compute_scenario(config_for(Scenario::kHomDip));
  const auto& r = art.summary["results"];
  EXPECT_EQ(r["dip_minimum_delay_um"].get<double>(), 0.0);
  const double expected = 0.949 * hom_visibility(r["epsilon"].get<double>());
  EXPECT_NEAR(r["expected_visibility"].get<double>(), expected, 1e-12);
  const double v = r["visibility"]["value"].get<double>();
  const double sigma = r["visibility"]["sigma"].get<double>();
  EXPECT_NEAR(v, expected, 3.0 * sigma);
  EXPECT_NEAR(r["model_full_width_um"].get<double>(), 440.0, 4.4);
  EXPECT_TRUE(art.files.count("sweep.csv"));
  EXPECT_EQ(art.files.at("sweep.csv").substr(0, art.files.at("sweep.csv").find('\n')), kSweepCsvHeader);
  EXPECT_EQ(art.summary["reference_values"]["visibility"].get<double>(), 0.949);
  expect_valid(art.summary);
}

TEST(Scenario, DeterministicPerSeed) {
  for (auto s : {Scenario::kHomDip, Scenario::kQuantumFringe}) {
    auto cfg = config_for(s);
    cfg.seed = 77;
    const auto a = compute_scenario(cfg);
    const auto b = compute_scenario(cfg);
    EXPECT_EQ(a.files, b.files);
    cfg.seed = 78;
    EXPECT_NE(compute_scenario(cfg).files.at("sweep.csv"), a.files.at("sweep.csv"));
  }
}

TEST(Scenario, ReflectionAnalysisDefaults) {
  const auto art = compute_scenario(config_for(Scenario::kReflectionAnalysis));
  const auto& r = art.summary["results"];
  EXPECT_NEAR(r["worst_degradation"].get<double>(), 0.044, 0.002);
  EXPECT_NEAR(r["best_degradation"].get<double>(), 0.0, 1e-12);
  EXPECT_FALSE(r["delta_phi_for_observed_degradation"].is_null());
  EXPECT_EQ(art.summary["reference_values"]["worst_degradation"].get<double>(), 0.044);
  EXPECT_EQ(art.files.at("reflection.csv").substr(0, 43), "delta_phi,dip_rate,shoulder_rate,degradatio");
  expect_valid(art.summary);
}

TEST(Scenario, CouplerDesignCrossing) {
  auto cfg = config_for(Scenario::kCouplerDesign);
  cfg.coupler.gap = 2.5;
  cfg.sweep = SweepRange{0.0, 300.0, 1.0};
  const auto art = compute_scenario(cfg);
  const auto& r = art.summary["results"];
  EXPECT_NEAR(r["half_crossing_length_um"].get<double>(), 140.0, 1e-6);
  EXPECT_NEAR(r["sweep_half_crossing_length_um"].get<double>(), 140.0, 0.5);
  EXPECT_NEAR(r["anchor_epsilon_gap_3_0_length_255"].get<double>(), 0.3, 1e-6);
  EXPECT_EQ(art.files.at("coupler.csv").substr(0, 17), "length_um,epsilon");
  expect_valid(art.summary);
}

TEST(Scenario, ClassicalFringe) {
  const auto art = compute_scenario(config_for(Scenario::kClassicalFringe));
  const auto& r = art.summary["results"];
  EXPECT_NEAR(r["theta_at_v_pi"].get<double>(), 3.141592653589793, 1e-9);
  EXPECT_NEAR(r["output1"]["visibility"]["value"].get<double>(), 0.7241, 1e-3);
  EXPECT_NEAR(r["output2"]["visibility"]["value"].get<double>(), 1.0, 1e-6);
  expect_valid(art.summary);
}

TEST(Scenario, QuantumFringe) {
  auto cfg = config_for(Scenario::kQuantumFringe);
  cfg.tm_background = 0.05;
  const auto art = compute_scenario(cfg);
  const auto& r = art.summary["results"];
  ASSERT_TRUE(r["fit"]["converged"].get<bool>());
  const double v = r["visibility"]["value"].get<double>();
  EXPECT_NEAR(v, r["model_visibility"].get<double>(), 2.0 * r["visibility"]["sigma"].get<double>());
  expect_valid(art.summary);
}

TEST(Scenario, FitReadsSweepCsv) {
  auto dip = config_for(Scenario::kHomDip);
  dip.out_dir = scratch_dir("fit_source").string();
  const auto source = run_scenario(dip);

  auto cfg = config_for(Scenario::kFit);
  cfg.fit_input = (fs::path(dip.out_dir) / "sweep.csv").string();
  const auto art = compute_scenario(cfg);
  EXPECT_EQ(art.summary["results"]["visibility"], source.summary["results"]["visibility"]);
  expect_valid(art.summary);

  cfg.fit_model = FitModelKind::kSinusoid;
  EXPECT_NO_THROW(compute_scenario(cfg));
}

TEST(Scenario, FitInputErrors) {
  auto cfg = config_for(Scenario::kFit);
  EXPECT_THROW(compute_scenario(cfg), ConfigError);
  cfg.fit_input = "/nonexistent/sweep.csv";
  EXPECT_THROW(compute_scenario(cfg), IoError);
  const auto dir = scratch_dir("bad_csv");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.csv") << "x,y\n1,2\n";
  cfg.fit_input = (dir / "bad.csv").string();
  EXPECT_THROW(compute_scenario(cfg), IoError);
}

TEST(Scenario, WritesFilesAndReportsUnwritableOutput) {
  auto cfg = config_for(Scenario::kCouplerDesign);
  const auto dir = scratch_dir("write");
  cfg.out_dir = dir.string();
  const auto art = run_scenario(cfg);
  for (const auto& [name, text] : art.files) {
    std::ifstream in(dir / name, std::ios::binary);
    std::string disk((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    EXPECT_EQ(disk, text) << name;
  }
  std::ofstream(dir / "plain_file") << "x";
  cfg.out_dir = (dir / "plain_file" / "sub").string();
  EXPECT_THROW(run_scenario(cfg), IoError);
}

TEST(Scenario, SvgIsOptional) {
  auto cfg = config_for(Scenario::kCouplerDesign);
  EXPECT_TRUE(compute_scenario(cfg).files.count("plot.svg"));
  cfg.svg = false;
  const auto art = compute_scenario(cfg);
  EXPECT_FALSE(art.files.count("plot.svg"));
  for (const auto& f : art.summary["files"]) EXPECT_NE(f.get<std::string>(), "plot.svg");
}
