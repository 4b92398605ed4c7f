#include <gtest/gtest.h>

#include <cmath>

#include "qpc/device.hpp"
#include "qpc/error.hpp"
#include "qpc/experiment.hpp"
#include "qpc/fitting.hpp"
#include "qpc/interference.hpp"

using namespace qpc;

namespace {

lsq::Observations sample(const std::function<double(double)>& f, double lo, double hi, int n,
                         double sigma = 1.0) {
  lsq::Observations d;
  for (int i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * i / (n - 1);
    d.x.push_back(x);
    d.y.push_back(f(x));
    d.sigma.push_back(sigma);
  }
  return d;
}

// Simulated HOM sweep: 20 um steps over +-300 um, balanced coupler.
SweepRecord simulated_dip(std::uint64_t seed, double v_cap) {
  CountingConfig cfg;
  cfg.rng_seed = seed;
  const auto kernel = SpectralModel::triangular(0.73e-12);
  std::vector<double> x;
  for (double d = -300.0; d <= 300.0 + 1e-9; d += 20.0) x.push_back(d);
  return simulate_sweep(
      x,
      [&](double d) {
        return distinguishable_coincidence_probability(0.5) *
               (1.0 - v_cap * hom_visibility(0.5) * overlap_kernel(delay_um_to_seconds(d), kernel));
      },
      cfg);
}

}  // namespace

TEST(TriangleFit, RecoversNoiselessParameters) {
  const TriangleDipModel truth{400.0, 0.949, 12.0, 220.0};
  const auto d = sample(truth, -300.0, 300.0, 61);
  const auto fit = fit_triangular_dip(d);
  ASSERT_TRUE(fit.stats.converged);
  EXPECT_NEAR(fit.model.baseline, 400.0, 400.0 * 1e-6);
  EXPECT_NEAR(fit.model.visibility, 0.949, 0.949 * 1e-6);
  EXPECT_NEAR(fit.model.center, 12.0, 220.0 * 1e-6);
  EXPECT_NEAR(fit.model.half_width, 220.0, 220.0 * 1e-6);
  const auto v = extract_visibility(fit, VisibilityConvention::kDip);
  EXPECT_NEAR(v.value, 0.949, 1e-6);
}

TEST(TriangleFit, FlatDataIsReportedNotThrown) {
  const auto d = sample([](double) { return 250.0; }, -300.0, 300.0, 31, 15.0);
  const auto fit = fit_triangular_dip(d);
  EXPECT_NEAR(fit.model.visibility, 0.0, 1e-6);
  EXPECT_FALSE(fit.stats.converged);
  EXPECT_THROW(extract_visibility(fit, VisibilityConvention::kDip), ConvergenceError);
  const auto zeros = sample([](double) { return 0.0; }, -300.0, 300.0, 31);
  EXPECT_FALSE(fit_triangular_dip(zeros).stats.converged);
}

TEST(TriangleFit, NeedsEightPoints) {
  const auto d = sample([](double) { return 1.0; }, 0.0, 1.0, 7);
  EXPECT_THROW(fit_triangular_dip(d), RangeError);
}

TEST(TriangleFit, CoverageOverSeeds) {
  int covered = 0;
  int converged = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const auto fit = fit_triangular_dip(simulated_dip(seed, 0.949));
    if (!fit.stats.converged) continue;
    ++converged;
    const auto v = extract_visibility(fit, VisibilityConvention::kDip);
    if (std::abs(v.value - 0.949) <= 2.0 * v.sigma) ++covered;
  }
  EXPECT_EQ(converged, 50);
  EXPECT_GE(covered, 45);
}

TEST(SinusoidFit, CosSquaredHasDoubleFrequency) {
  const auto d = sample([](double t) { return std::cos(t) * std::cos(t); }, 0.0, 2.0 * kPi, 61, 0.01);
  const auto fit = fit_sinusoid(d, kPi);
  ASSERT_TRUE(fit.stats.converged);
  EXPECT_NEAR(fit.model.period, kPi, 1e-6);
  EXPECT_NEAR(fit.model.offset, 0.5, 1e-6);
  EXPECT_NEAR(fit.model.amplitude, 0.5, 1e-6);
  // Same data: both conventions give full visibility.
  EXPECT_NEAR(extract_visibility(fit, VisibilityConvention::kFringe).value, 1.0, 1e-6);
  EXPECT_NEAR(extract_visibility(fit, VisibilityConvention::kDip).value, 1.0, 1e-6);
}

TEST(SinusoidFit, OffsetDataConventionsDiverge) {
  // max 1.0, min 0.2.
  const auto d = sample([](double t) { return 0.6 + 0.4 * std::cos(t); }, 0.0, 4.0 * kPi, 81, 0.01);
  const auto fit = fit_sinusoid(d, 2.0 * kPi);
  ASSERT_TRUE(fit.stats.converged);
  EXPECT_NEAR(extract_visibility(fit, VisibilityConvention::kFringe).value, 0.8 / 1.2, 1e-6);
  EXPECT_NEAR(extract_visibility(fit, VisibilityConvention::kDip).value, 0.8, 1e-6);
}

TEST(SinusoidFit, ConstantDataHasNoAmplitude) {
  const auto d = sample([](double) { return 3.0; }, 0.0, 2.0 * kPi, 41, 0.1);
  const auto fit = fit_sinusoid(d, 2.0 * kPi);
  EXPECT_NEAR(fit.model.amplitude, 0.0, 1e-6);
  EXPECT_NEAR(fit.model.offset, 3.0, 1e-6);
  EXPECT_FALSE(fit.stats.converged);
}

TEST(SinusoidFit, ClassicalFringeContrast) {
  std::vector<double> th;
  for (int i = 0; i <= 60; ++i) th.push_back(2.0 * kPi * i / 60);
  const auto out1 = classical_fringe(0.3, th).first;
  const lsq::Observations d{th, out1.value, std::vector<double>(th.size(), 1e-3)};
  const auto fit = fit_sinusoid(d, 2.0 * kPi);
  ASSERT_TRUE(fit.stats.converged);
  EXPECT_NEAR(extract_visibility(fit, VisibilityConvention::kFringe).value, 0.724, 5e-4);
}

TEST(SinusoidFit, RecoversNoiselessParameters) {
  const SinusoidModel truth{10.0, 4.0, 2.5, 0.8};
  const auto fit = fit_sinusoid(sample(truth, 0.0, 10.0, 80, 0.1), 2.2);
  ASSERT_TRUE(fit.stats.converged);
  EXPECT_NEAR(fit.model.offset, 10.0, 1e-5);
  EXPECT_NEAR(fit.model.amplitude, 4.0, 4e-6);
  EXPECT_NEAR(fit.model.period, 2.5, 2.5e-6);
  EXPECT_NEAR(fit.model.phase, 0.8, 1e-6);
}

TEST(SinusoidFit, PeriodEstimate) {
  const auto d = sample(SinusoidModel{5.0, 2.0, 3.3, 0.2}, 0.0, 20.0, 101, 0.1);
  EXPECT_NEAR(estimate_period(d), 3.3, 0.1);
  EXPECT_THROW(fit_sinusoid(d, 0.0), RangeError);
}

TEST(Visibility, ExtractionExamples) {
  FitResult<TriangleDipModel> tri{{100.0, 0.949, 0.0, 220.0}, {1.0, 0.013, 1.0, 1.0}, {}};
  tri.stats.converged = true;
  EXPECT_EQ(extract_visibility(tri, VisibilityConvention::kDip).value, 0.949);
  EXPECT_EQ(extract_visibility(tri, VisibilityConvention::kDip).sigma, 0.013);
  EXPECT_NEAR(extract_visibility(tri, VisibilityConvention::kFringe).value, 0.949 / (2.0 - 0.949), 1e-15);

  FitResult<SinusoidModel> full{{1.0, 1.0, 2.0 * kPi, 0.0}, {}, {}};
  full.stats.converged = true;
  full.stats.covariance = Eigen::Matrix4d::Zero();
  EXPECT_EQ(extract_visibility(full, VisibilityConvention::kFringe).value, 1.0);

  FitResult<SinusoidModel> classical{{1.0, 0.722, 2.0 * kPi, 0.0}, {}, {}};
  classical.stats.converged = true;
  classical.stats.covariance = Eigen::Matrix4d::Zero();
  classical.stats.covariance(0, 0) = 0.01 * 0.01;
  classical.stats.covariance(1, 1) = 0.02 * 0.02;
  const auto v = extract_visibility(classical, VisibilityConvention::kFringe);
  EXPECT_NEAR(v.value, 0.722, 1e-15);
  // sigma^2 = (sA / O)^2 + (A sO / O^2)^2 for independent A and O.
  EXPECT_NEAR(v.sigma, std::hypot(0.02, 0.722 * 0.01), 1e-12);

  classical.stats.converged = false;
  EXPECT_THROW(extract_visibility(classical, VisibilityConvention::kFringe), ConvergenceError);
}

TEST(QuantumFringeFit, RecoversNoiselessParameters) {
  const QuantumFringeModel truth{0.3, 500.0, 0.1, 20.0};
  const auto d = sample(truth, 0.0, 2.0 * kPi, 53, 1.0);
  const auto fit = fit_quantum_fringe(d);
  ASSERT_TRUE(fit.stats.converged);
  EXPECT_NEAR(fit.model.epsilon, 0.3, 1e-6);
  EXPECT_NEAR(fit.model.scale, 500.0, 500.0 * 1e-6);
  EXPECT_NEAR(fit.model.phase, 0.1, 1e-6);
  EXPECT_NEAR(fit.model.background, 20.0, 1e-4);
  // Fringe visibility of the exact model: (max - min) / (max + min).
  double lo = 1e300, hi = -1e300;
  for (int i = 0; i < 100000; ++i) {
    const double y = truth(2.0 * kPi * i / 100000);
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  EXPECT_NEAR(extract_visibility(fit, VisibilityConvention::kFringe).value, (hi - lo) / (hi + lo), 1e-5);
}

TEST(QuantumFringeFit, NoisyFringeWithinErrors) {
  CountingConfig cfg;
  cfg.rng_seed = 5;
  std::vector<double> th;
  for (int i = 0; i <= 52; ++i) th.push_back(2.0 * kPi * i / 52);
  const double bg = 0.05;
  const auto rec = simulate_sweep(th, [&](double t) { return quantum_fringe_value(0.3, t, bg) / (1 + bg); }, cfg);
  const auto fit = fit_quantum_fringe(observations_from(rec));
  ASSERT_TRUE(fit.stats.converged);
  EXPECT_NEAR(fit.model.epsilon, 0.3, 3.0 * fit.sigma.epsilon);
  const auto truth = curve_visibility(quantum_fringe(0.3, th, bg).value, VisibilityConvention::kFringe);
  const auto v = extract_visibility(fit, VisibilityConvention::kFringe);
  EXPECT_NEAR(v.value, truth, 3.0 * v.sigma);
}

TEST(Fits, JsonHasParametersAndErrors) {
  const auto fit = fit_triangular_dip(sample(TriangleDipModel{100, 0.5, 0, 50}, -100, 100, 41));
  const auto j = to_json(fit);
  EXPECT_EQ(j["model"], "triangle-dip");
  EXPECT_TRUE(j["parameters"].contains("visibility"));
  EXPECT_TRUE(j["standard_errors"].contains("half_width"));
  EXPECT_TRUE(j["converged"].get<bool>());
}
