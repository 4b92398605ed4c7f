#include "qpc/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qpc/error.hpp"

namespace qpc::lsq {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double finite_step(const Problem& problem, const Eigen::VectorXd& p, Eigen::Index j) {
  const double typical = problem.scale.size() == p.size() ? std::abs(problem.scale[j]) : 1.0;
  return 1e-6 * std::max({std::abs(p[j]), typical, 1e-12});
}

// Free columns: not pinned at a bound by a gradient pointing outwards.
std::vector<bool> free_parameters(const Problem& problem, const Eigen::VectorXd& p,
                                  const Eigen::VectorXd& gradient) {
  std::vector<bool> free(static_cast<std::size_t>(p.size()), true);
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    const bool at_upper = p[j] >= problem.upper[j] && gradient[j] > 0.0;
    const bool at_lower = p[j] <= problem.lower[j] && gradient[j] < 0.0;
    free[static_cast<std::size_t>(j)] = !(at_upper || at_lower);
  }
  return free;
}

double gradient_cosine(const NormalEquations& ne, const std::vector<bool>& free) {
  const double rnorm = ne.weighted_residual.norm();
  if (rnorm == 0.0) return 0.0;
  double worst = 0.0;
  for (Eigen::Index j = 0; j < ne.jtwr.size(); ++j) {
    if (!free[static_cast<std::size_t>(j)]) continue;
    const double cnorm = ne.weighted_jacobian.col(j).norm();
    if (cnorm == 0.0) continue;
    worst = std::max(worst, std::abs(ne.jtwr[j]) / (cnorm * rnorm));
  }
  return worst;
}

double chi2_at(const Problem& problem, const Eigen::VectorXd& p) {
  double chi2 = 0.0;
  for (std::size_t i = 0; i < problem.data.size(); ++i) {
    const double r = (problem.data.y[i] - problem.model(problem.data.x[i], p)) / problem.data.sigma[i];
    chi2 += r * r;
  }
  return chi2;
}

// One-sided probe along parameter j: true when moving either way raises chi^2.
// On a smooth valley this only happens at the optimum; on a kink (a triangle
// apex sitting on a sample) it happens while the central difference is not 0.
bool coordinate_minimum(const Problem& problem, const Eigen::VectorXd& p, double chi2, Eigen::Index j) {
  for (double sign : {-1.0, 1.0}) {
    Eigen::VectorXd q = p;
    q[j] += sign * finite_step(problem, p, j);
    q = problem.clamp(q);
    if (q[j] == p[j]) continue;
    if (chi2_at(problem, q) < chi2) return false;
  }
  return true;
}

struct Descent {
  Eigen::VectorXd params;
  NormalEquations ne;
  int iterations = 0;
};

Descent descend(const Problem& problem, const Eigen::VectorXd& start, const Options& options,
                double exact_fit_chi2) {
  const Eigen::Index m = problem.parameter_count();
  Descent d;
  d.params = problem.clamp(start);
  d.ne = normal_equations(problem, d.params);
  double lambda = 1e-3;
  int& iter = d.iterations;
  for (; iter < options.max_iterations; ++iter) {
    if (d.ne.chi2 <= exact_fit_chi2) break;
    const auto free = free_parameters(problem, d.params, d.ne.jtwr);
    if (gradient_cosine(d.ne, free) <= options.gradient_tolerance * 1e-3) break;

    // Parameters held at a bound are frozen for this step.
    Eigen::MatrixXd damped = d.ne.jtwj;
    Eigen::VectorXd rhs = d.ne.jtwr;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (free[static_cast<std::size_t>(j)]) {
        damped(j, j) += lambda * std::max(d.ne.jtwj(j, j), 1e-12);
      } else {
        damped.row(j).setZero();
        damped.col(j).setZero();
        damped(j, j) = 1.0;
        rhs[j] = 0.0;
      }
    }
    const Eigen::VectorXd step = damped.ldlt().solve(rhs);
    const Eigen::VectorXd trial = problem.clamp(d.params + step);
    if ((trial - d.params).norm() <= 1e-15 * (d.params.norm() + 1e-15)) {
      if (lambda > 1e12) break;
      lambda *= 10.0;
      continue;
    }
    NormalEquations trial_ne = normal_equations(problem, trial);
    if (std::isfinite(trial_ne.chi2) && trial_ne.chi2 < d.ne.chi2) {
      const double gain = (d.ne.chi2 - trial_ne.chi2) / std::max(d.ne.chi2, 1e-300);
      d.params = trial;
      d.ne = std::move(trial_ne);
      lambda = std::max(lambda / 3.0, 1e-12);
      if (gain < 1e-15) break;
    } else {
      lambda *= 4.0;
      if (lambda > 1e16) break;
    }
  }
  return d;
}

}  // namespace

void Observations::validate() const {
  if (x.size() != y.size() || x.size() != sigma.size()) {
    throw RangeError("observation arrays must have equal length");
  }
  for (double s : sigma) {
    if (!(s > 0.0)) throw RangeError("observation sigma must be > 0");
  }
}

Eigen::VectorXd Problem::clamp(Eigen::VectorXd p) const {
  for (Eigen::Index j = 0; j < p.size(); ++j) p[j] = std::clamp(p[j], lower[j], upper[j]);
  return p;
}

NormalEquations normal_equations(const Problem& problem, const Eigen::VectorXd& params) {
  const auto& d = problem.data;
  const auto n = static_cast<Eigen::Index>(d.size());
  const Eigen::Index m = params.size();
  NormalEquations ne;
  ne.weighted_jacobian.resize(n, m);
  ne.weighted_residual.resize(n);
  Eigen::VectorXd probe = params;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double w = 1.0 / d.sigma[k];
    ne.weighted_residual[i] = (d.y[k] - problem.model(d.x[k], params)) * w;
    for (Eigen::Index j = 0; j < m; ++j) {
      const double h = finite_step(problem, params, j);
      probe[j] = params[j] + h;
      const double up = problem.model(d.x[k], probe);
      probe[j] = params[j] - h;
      const double down = problem.model(d.x[k], probe);
      probe[j] = params[j];
      ne.weighted_jacobian(i, j) = (up - down) / (2.0 * h) * w;
    }
  }
  ne.jtwj = ne.weighted_jacobian.transpose() * ne.weighted_jacobian;
  ne.jtwr = ne.weighted_jacobian.transpose() * ne.weighted_residual;
  ne.chi2 = ne.weighted_residual.squaredNorm();
  return ne;
}

Solution levenberg_marquardt(const Problem& problem, const Eigen::VectorXd& start,
                             const Options& options) {
  problem.data.validate();
  const Eigen::Index m = problem.parameter_count();
  if (start.size() != m || problem.upper.size() != m) {
    throw DimensionError("parameter vectors disagree in length");
  }

  double data_scale = 0.0;
  for (std::size_t i = 0; i < problem.data.size(); ++i) {
    const double z = problem.data.y[i] / problem.data.sigma[i];
    data_scale += z * z;
  }
  const double exact_fit_chi2 = 1e-24 * std::max(data_scale, 1e-300);

  Solution sol;
  Descent d = descend(problem, start, options, exact_fit_chi2);
  bool stationary =
      d.ne.chi2 <= exact_fit_chi2 ||
      gradient_cosine(d.ne, free_parameters(problem, d.params, d.ne.jtwr)) <= options.gradient_tolerance;

  // Stopped short of a stationary point, typically zigzagging across a kink:
  // pin every parameter that sits on one, finish the smooth ones, then require
  // the pinned ones to be one-sided minima of the full problem.
  if (!stationary) {
    Problem pinned = problem;
    std::vector<Eigen::Index> kinks;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (coordinate_minimum(problem, d.params, d.ne.chi2, j)) {
        pinned.lower[j] = pinned.upper[j] = d.params[j];
        kinks.push_back(j);
      }
    }
    if (!kinks.empty()) {
      Descent rest = descend(pinned, d.params, options, exact_fit_chi2);
      rest.iterations += d.iterations;
      if (rest.ne.chi2 <= d.ne.chi2) d = std::move(rest);
      const bool smooth_done =
          d.ne.chi2 <= exact_fit_chi2 ||
          gradient_cosine(d.ne, free_parameters(pinned, d.params, d.ne.jtwr)) <= options.gradient_tolerance;
      bool kinks_hold = true;
      for (Eigen::Index j : kinks) kinks_hold = kinks_hold && coordinate_minimum(problem, d.params, d.ne.chi2, j);
      stationary = smooth_done && kinks_hold;
    }
  }
  sol.params = d.params;
  const NormalEquations& ne = d.ne;
  sol.iterations = d.iterations;
  sol.chi2 = ne.chi2;

  const auto n = static_cast<Eigen::Index>(problem.data.size());
  const Eigen::Index dof = n - m;
  sol.reduced_chi2 = dof > 0 ? sol.chi2 / static_cast<double>(dof) : 0.0;

  // Covariance from the pseudo-inverse of J^T W J; parameters the data do not
  // touch get infinite uncertainty and flag the fit as degenerate.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(ne.jtwj, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? sv[0] * 1e-12 : 0.0;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  int rank = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    if (sv[k] > cutoff && sv[k] > 0.0) {
      inv[k] = 1.0 / sv[k];
      ++rank;
    }
  }
  sol.rank_deficient = rank < m;
  const double scale = sol.reduced_chi2 > 0.0 ? sol.reduced_chi2 : 1.0;
  sol.covariance = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose() * scale;
  sol.sigma.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const bool untouched = ne.weighted_jacobian.col(j).norm() == 0.0;
    sol.sigma[j] = (untouched || (sol.rank_deficient && sol.covariance(j, j) <= 0.0))
                       ? kInf
                       : std::sqrt(std::max(0.0, sol.covariance(j, j)));
  }
  if (dof <= 0 && sol.chi2 > exact_fit_chi2) sol.sigma.setConstant(kInf);

  sol.converged = stationary && !sol.rank_deficient && std::isfinite(sol.chi2);
  return sol;
}

Solution multi_start(const Problem& problem, const std::vector<Eigen::VectorXd>& starts,
                     const Options& options) {
  if (starts.empty()) throw RangeError("multi_start needs at least one start");
  Solution best;
  bool have = false;
  for (const auto& s : starts) {
    Solution cand = levenberg_marquardt(problem, s, options);
    const bool better = !have || (cand.converged && !best.converged) ||
                        (cand.converged == best.converged && cand.chi2 < best.chi2 * (1 - 1e-12));
    if (better) {
      best = std::move(cand);
      have = true;
    }
  }
  return best;
}

}  // namespace qpc::lsq
