// Visibility and shape recovery from sweep data: inverse-triangle dip fits,
// sinusoidal fringe fits, and a fit of the exact two-photon MZI fringe.
#pragma once

#include <Eigen/Dense>
#include <json.hpp>

#include "qpc/experiment.hpp"
#include "qpc/interference.hpp"
#include "qpc/least_squares.hpp"

namespace qpc {

/// baseline * (1 - visibility * max(0, 1 - |x - center| / half_width)).
struct TriangleDipModel {
  double baseline = 0.0;
  double visibility = 0.0;
  double center = 0.0;
  double half_width = 1.0;

  double operator()(double x) const;
};

/// offset + amplitude * cos(2 pi x / period + phase).
struct SinusoidModel {
  double offset = 0.0;
  double amplitude = 0.0;
  double period = 1.0;
  double phase = 0.0;

  double operator()(double theta) const;
};

/// scale * P11(epsilon, theta + phase) + background, where P11 is the
/// coincidence probability at the output of an MZI of two identical couplers.
struct QuantumFringeModel {
  double epsilon = 0.5;
  double scale = 1.0;
  double phase = 0.0;
  double background = 0.0;

  double operator()(double theta) const;
};

struct FitStatistics {
  Eigen::MatrixXd covariance;
  double rss = 0.0;  // weighted residual sum of squares (chi^2)
  double reduced_chi2 = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Fitted model, per-parameter standard errors (stored in the same layout)
/// and fit diagnostics. Parameters are filled even when the fit did not
/// converge; consumers must check stats.converged.
template <class Model>
struct FitResult {
  Model model;
  Model sigma;
  FitStatistics stats;
};

/// Fit observations from a sweep record: corrected counts with their
/// Poisson errors. Zero errors (zero raw counts) are replaced by 1 count.
lsq::Observations observations_from(const SweepRecord& rec);

/// Weighted least-squares inverse-triangle fit; visibility is bounded to
/// [0, 1]. Needs >= 8 points. Degenerate data yields converged = false.
FitResult<TriangleDipModel> fit_triangular_dip(const lsq::Observations& data);
FitResult<TriangleDipModel> fit_triangular_dip(const SweepRecord& data);

/// Sinusoid fit with the period confined to +-30% of `period_hint`, so a
/// fringe and its second harmonic are told apart by the hint.
FitResult<SinusoidModel> fit_sinusoid(const lsq::Observations& data, double period_hint);
FitResult<SinusoidModel> fit_sinusoid(const SweepRecord& data, double period_hint);

/// Dominant period of the data from a least-squares periodogram scanned between
/// twice the smallest sample spacing and the data extent.
double estimate_period(const lsq::Observations& data);

/// Fit of the exact two-photon fringe with free coupling ratio (in [0, 0.5];
/// the fringe is symmetric under eps -> 1 - eps), scale, phase and background.
/// Controls are relative phases in radians.
FitResult<QuantumFringeModel> fit_quantum_fringe(const lsq::Observations& data);

struct VisibilityEstimate {
  double value;
  double sigma;
};

/// Visibility with first-order error propagation. Throws ConvergenceError for
/// an unconverged fit. Dip convention: (max - min) / max; fringe convention:
/// (max - min) / (max + min).
VisibilityEstimate extract_visibility(const FitResult<TriangleDipModel>& fit,
                                      VisibilityConvention convention);
VisibilityEstimate extract_visibility(const FitResult<SinusoidModel>& fit,
                                      VisibilityConvention convention);
VisibilityEstimate extract_visibility(const FitResult<QuantumFringeModel>& fit,
                                      VisibilityConvention convention);

nlohmann::ordered_json to_json(const FitResult<TriangleDipModel>& fit);
nlohmann::ordered_json to_json(const FitResult<SinusoidModel>& fit);
nlohmann::ordered_json to_json(const FitResult<QuantumFringeModel>& fit);

}  // namespace qpc
