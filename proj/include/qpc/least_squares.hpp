// Bounded weighted nonlinear least squares (Levenberg-Marquardt with a
// central-difference Jacobian) used by the curve fits.
#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace qpc::lsq {

struct Observations {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> sigma;  // one standard error per point, > 0

  std::size_t size() const { return x.size(); }
  /// Throws RangeError on length mismatch or non-positive sigma.
  void validate() const;
};

using ModelFn = std::function<double(double x, const Eigen::VectorXd& params)>;

struct Problem {
  ModelFn model;
  Observations data;
  Eigen::VectorXd lower;  // -inf allowed
  Eigen::VectorXd upper;  // +inf allowed
  /// Typical magnitude per parameter, used for finite-difference steps.
  Eigen::VectorXd scale;

  Eigen::Index parameter_count() const { return lower.size(); }
  Eigen::VectorXd clamp(Eigen::VectorXd p) const;
};

/// Weighted normal equations at `params`: J^T W J, J^T W r and chi^2 with
/// r = y - f(x) and W = diag(1 / sigma^2).
struct NormalEquations {
  Eigen::MatrixXd jtwj;
  Eigen::VectorXd jtwr;
  double chi2 = 0.0;
  Eigen::MatrixXd weighted_jacobian;  // rows J_i / sigma_i
  Eigen::VectorXd weighted_residual;  // r_i / sigma_i
};

NormalEquations normal_equations(const Problem& problem, const Eigen::VectorXd& params);

struct Options {
  int max_iterations = 400;
  /// Largest cosine between the residual and any free Jacobian column.
  double gradient_tolerance = 1e-6;
};

struct Solution {
  Eigen::VectorXd params;
  Eigen::VectorXd sigma;         // +inf where the data do not constrain a parameter
  Eigen::MatrixXd covariance;    // scaled by the reduced chi^2
  double chi2 = 0.0;
  double reduced_chi2 = 0.0;
  int iterations = 0;
  bool converged = false;
  bool rank_deficient = false;
};

Solution levenberg_marquardt(const Problem& problem, const Eigen::VectorXd& start,
                             const Options& options = {});

/// Runs every start and keeps the lowest chi^2, preferring converged runs.
/// Ties go to the earliest start, so the result is deterministic.
Solution multi_start(const Problem& problem, const std::vector<Eigen::VectorXd>& starts,
                     const Options& options = {});

}  // namespace qpc::lsq
