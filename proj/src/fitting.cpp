#include "qpc/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qpc/device.hpp"
#include "qpc/error.hpp"

namespace qpc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct DataSummary {
  double x_min, x_max, extent;
  double y_min, y_max, y_mean;
  double x_at_y_min;
};

DataSummary summarize(const lsq::Observations& d) {
  if (d.size() == 0) throw RangeError("no data to fit");
  DataSummary s{};
  const auto [xlo, xhi] = std::minmax_element(d.x.begin(), d.x.end());
  const auto [ylo, yhi] = std::minmax_element(d.y.begin(), d.y.end());
  s.x_min = *xlo;
  s.x_max = *xhi;
  s.extent = std::max(s.x_max - s.x_min, 1e-300);
  s.y_min = *ylo;
  s.y_max = *yhi;
  s.y_mean = std::accumulate(d.y.begin(), d.y.end(), 0.0) / static_cast<double>(d.size());
  s.x_at_y_min = d.x[static_cast<std::size_t>(ylo - d.y.begin())];
  return s;
}

FitStatistics statistics(const lsq::Solution& sol) {
  return {sol.covariance, sol.chi2, sol.reduced_chi2, sol.iterations, sol.converged};
}

void require_converged(const FitStatistics& stats) {
  if (!stats.converged) throw ConvergenceError("visibility requested from an unconverged fit");
}

double wrap_phase(double phase) {
  double w = std::remainder(phase, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

double mzi_coincidence(double eps, double theta) {
  const double split = 2.0 * eps * (1.0 - eps);
  const double imbalance = 1.0 - 2.0 * eps;
  const std::complex<double> amp = -split * std::polar(1.0, -2.0 * theta) +
                                   imbalance * imbalance * std::polar(1.0, -theta) - split;
  return std::norm(amp);
}

nlohmann::ordered_json stats_json(const FitStatistics& s) {
  return {{"rss", s.rss},
          {"reduced_chi2", s.reduced_chi2},
          {"iterations", s.iterations},
          {"converged", s.converged}};
}

nlohmann::ordered_json number_or_null(double x) {
  return std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json(nullptr);
}

}  // namespace

double TriangleDipModel::operator()(double x) const {
  const double w = std::max(std::abs(half_width), 1e-300);
  return baseline * (1.0 - visibility * std::max(0.0, 1.0 - std::abs(x - center) / w));
}

double SinusoidModel::operator()(double x) const {
  return offset + amplitude * std::cos(2.0 * kPi * x / period + phase);
}

double QuantumFringeModel::operator()(double theta) const {
  return scale * mzi_coincidence(epsilon, theta + phase) + background;
}

lsq::Observations observations_from(const SweepRecord& rec) {
  lsq::Observations obs;
  for (const auto& p : rec.points) {
    obs.x.push_back(p.control);
    obs.y.push_back(p.corrected);
    obs.sigma.push_back(p.error > 0.0 ? p.error : 1.0);
  }
  return obs;
}

FitResult<TriangleDipModel> fit_triangular_dip(const lsq::Observations& data) {
  data.validate();
  if (data.size() < 8) throw RangeError("triangular dip fit needs at least 8 points");
  const auto s = summarize(data);

  lsq::Problem problem;
  problem.data = data;
  problem.model = [](double x, const Eigen::VectorXd& p) {
    return TriangleDipModel{p[0], p[1], p[2], p[3]}(x);
  };
  problem.lower = Eigen::Vector4d(0.0, 0.0, s.x_min, s.extent * 1e-9);
  problem.upper = Eigen::Vector4d(kInf, 1.0, s.x_max, 2.0 * s.extent);
  problem.scale = Eigen::Vector4d(std::max(std::abs(s.y_max), 1e-12), 1.0, s.extent, s.extent);

  const double b0 = std::max(s.y_max, 0.0);
  const double v0 = b0 > 0.0 ? std::clamp(1.0 - s.y_min / b0, 0.0, 1.0) : 0.0;
  const double mid = 0.5 * (s.x_min + s.x_max);
  const std::vector<Eigen::VectorXd> starts = {
      Eigen::Vector4d(b0, v0, s.x_at_y_min, s.extent / 4.0),
      Eigen::Vector4d(b0, v0, s.x_at_y_min, s.extent / 8.0),
      Eigen::Vector4d(b0, v0, s.x_at_y_min, s.extent / 2.0),
      Eigen::Vector4d(b0, v0, mid, s.extent / 4.0),
      Eigen::Vector4d(std::max(s.y_mean, 0.0), 0.5, s.x_at_y_min, s.extent / 3.0),
  };
  const auto sol = lsq::multi_start(problem, starts);
  const auto& p = sol.params;
  const auto& e = sol.sigma;
  return {TriangleDipModel{p[0], p[1], p[2], p[3]}, TriangleDipModel{e[0], e[1], e[2], e[3]},
          statistics(sol)};
}

FitResult<TriangleDipModel> fit_triangular_dip(const SweepRecord& data) {
  return fit_triangular_dip(observations_from(data));
}

FitResult<SinusoidModel> fit_sinusoid(const lsq::Observations& data, double period_hint) {
  data.validate();
  if (!(period_hint > 0.0)) throw RangeError("period hint must be > 0");
  if (data.size() < 5) throw RangeError("sinusoid fit needs at least 5 points");
  const auto s = summarize(data);

  lsq::Problem problem;
  problem.data = data;
  problem.model = [](double x, const Eigen::VectorXd& p) {
    return SinusoidModel{p[0], p[1], p[2], p[3]}(x);
  };
  problem.lower = Eigen::Vector4d(-kInf, 0.0, 0.7 * period_hint, -kInf);
  problem.upper = Eigen::Vector4d(kInf, kInf, 1.3 * period_hint, kInf);
  const double span = std::max(s.y_max - s.y_min, 1e-12);
  problem.scale = Eigen::Vector4d(std::max(std::abs(s.y_mean), span), span, period_hint, 1.0);

  std::vector<Eigen::VectorXd> starts;
  for (int k = 0; k < 5; ++k) {
    const double phase = -kPi + 2.0 * kPi * k / 5.0;
    starts.push_back(Eigen::Vector4d(s.y_mean, 0.5 * (s.y_max - s.y_min), period_hint, phase));
  }
  const auto sol = lsq::multi_start(problem, starts);
  const auto& p = sol.params;
  const auto& e = sol.sigma;
  return {SinusoidModel{p[0], p[1], p[2], wrap_phase(p[3])},
          SinusoidModel{e[0], e[1], e[2], e[3]}, statistics(sol)};
}

FitResult<SinusoidModel> fit_sinusoid(const SweepRecord& data, double period_hint) {
  return fit_sinusoid(observations_from(data), period_hint);
}

double estimate_period(const lsq::Observations& data) {
  data.validate();
  if (data.size() < 4) throw RangeError("period estimate needs at least 4 points");
  const auto s = summarize(data);
  std::vector<double> xs = data.x;
  std::sort(xs.begin(), xs.end());
  double spacing = kInf;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (xs[i] > xs[i - 1]) spacing = std::min(spacing, xs[i] - xs[i - 1]);
  }
  if (!std::isfinite(spacing)) throw RangeError("period estimate needs distinct controls");

  // Power of the best-fitting cos/sin pair at each trial frequency.
  const double f_lo = 1.0 / s.extent;
  const double f_hi = 1.0 / (2.0 * spacing);
  constexpr int kTrials = 2000;
  double best_f = f_lo;
  double best_power = -1.0;
  for (int k = 0; k <= kTrials; ++k) {
    const double f = f_lo + (f_hi - f_lo) * k / kTrials;
    Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
    Eigen::Vector2d b = Eigen::Vector2d::Zero();
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double w = 1.0 / (data.sigma[i] * data.sigma[i]);
      const Eigen::Vector2d basis(std::cos(2.0 * kPi * f * data.x[i]),
                                  std::sin(2.0 * kPi * f * data.x[i]));
      a += w * basis * basis.transpose();
      b += w * basis * (data.y[i] - s.y_mean);
    }
    const double power = b.dot(a.ldlt().solve(b));
    if (power > best_power) {
      best_power = power;
      best_f = f;
    }
  }
  return 1.0 / best_f;
}

FitResult<QuantumFringeModel> fit_quantum_fringe(const lsq::Observations& data) {
  data.validate();
  if (data.size() < 5) throw RangeError("quantum fringe fit needs at least 5 points");
  const auto s = summarize(data);

  lsq::Problem problem;
  problem.data = data;
  problem.model = [](double x, const Eigen::VectorXd& p) {
    return QuantumFringeModel{p[0], p[1], p[2], p[3]}(x);
  };
  problem.lower = Eigen::Vector4d(0.0, 0.0, -kInf, 0.0);
  problem.upper = Eigen::Vector4d(0.5, kInf, kInf, kInf);
  const double span = std::max(s.y_max - s.y_min, 1e-12);
  problem.scale = Eigen::Vector4d(0.1, span, 1.0, span);

  std::vector<Eigen::VectorXd> starts;
  for (double eps : {0.3, 0.1, 0.2, 0.4, 0.5}) {
    starts.push_back(Eigen::Vector4d(eps, span, 0.0, std::max(s.y_min, 0.0)));
  }
  const auto sol = lsq::multi_start(problem, starts);
  const auto& p = sol.params;
  const auto& e = sol.sigma;
  return {QuantumFringeModel{p[0], p[1], wrap_phase(p[2]), p[3]},
          QuantumFringeModel{e[0], e[1], e[2], e[3]}, statistics(sol)};
}

VisibilityEstimate extract_visibility(const FitResult<TriangleDipModel>& fit,
                                      VisibilityConvention convention) {
  require_converged(fit.stats);
  const double v = fit.model.visibility;
  const double sv = fit.sigma.visibility;
  if (convention == VisibilityConvention::kDip) return {v, sv};
  // max = baseline, min = baseline (1 - v): (max - min)/(max + min) = v / (2 - v).
  const double d = 2.0 - v;
  return {v / d, 2.0 / (d * d) * sv};
}

VisibilityEstimate extract_visibility(const FitResult<SinusoidModel>& fit,
                                      VisibilityConvention convention) {
  require_converged(fit.stats);
  const double o = fit.model.offset;
  const double a = fit.model.amplitude;
  Eigen::Vector2d grad;
  double value = 0.0;
  if (convention == VisibilityConvention::kFringe) {
    if (o == 0.0) throw RangeError("fringe visibility undefined for zero offset");
    value = a / o;
    grad = Eigen::Vector2d(-a / (o * o), 1.0 / o);
  } else {
    const double sum = o + a;
    if (sum == 0.0) throw RangeError("dip visibility undefined for a zero maximum");
    value = 2.0 * a / sum;
    grad = Eigen::Vector2d(-2.0 * a / (sum * sum), 2.0 * o / (sum * sum));
  }
  const Eigen::Matrix2d cov = fit.stats.covariance.topLeftCorner(2, 2);
  return {value, std::sqrt(std::max(0.0, grad.dot(cov * grad)))};
}

VisibilityEstimate extract_visibility(const FitResult<QuantumFringeModel>& fit,
                                      VisibilityConvention convention) {
  require_converged(fit.stats);
  auto visibility_of = [&](const Eigen::Vector4d& p) {
    const QuantumFringeModel m{p[0], p[1], p[2], p[3]};
    constexpr int kGrid = 4096;
    double lo = kInf;
    double hi = -kInf;
    for (int k = 0; k < kGrid; ++k) {
      const double y = m(2.0 * kPi * k / kGrid);
      lo = std::min(lo, y);
      hi = std::max(hi, y);
    }
    return convention == VisibilityConvention::kDip ? dip_visibility(hi, lo)
                                                    : fringe_visibility(hi, lo);
  };
  const Eigen::Vector4d p(fit.model.epsilon, fit.model.scale, fit.model.phase,
                          fit.model.background);
  const double value = visibility_of(p);
  Eigen::Vector4d grad;
  for (int j = 0; j < 4; ++j) {
    const double h = 1e-6 * std::max(std::abs(p[j]), 1e-3);
    Eigen::Vector4d up = p;
    Eigen::Vector4d down = p;
    up[j] += h;
    down[j] -= h;
    if (j == 0) {
      up[j] = std::min(up[j], 0.5);
      down[j] = std::max(down[j], 0.0);
    }
    grad[j] = (visibility_of(up) - visibility_of(down)) / (up[j] - down[j]);
  }
  const Eigen::Matrix4d cov = fit.stats.covariance;
  return {value, std::sqrt(std::max(0.0, grad.dot(cov * grad)))};
}

nlohmann::ordered_json to_json(const FitResult<TriangleDipModel>& fit) {
  nlohmann::ordered_json j;
  j["model"] = "triangle-dip";
  j["parameters"] = {{"baseline", fit.model.baseline},
                     {"visibility", fit.model.visibility},
                     {"center", fit.model.center},
                     {"half_width", fit.model.half_width}};
  j["standard_errors"] = {{"baseline", number_or_null(fit.sigma.baseline)},
                          {"visibility", number_or_null(fit.sigma.visibility)},
                          {"center", number_or_null(fit.sigma.center)},
                          {"half_width", number_or_null(fit.sigma.half_width)}};
  j.update(stats_json(fit.stats));
  return j;
}

nlohmann::ordered_json to_json(const FitResult<SinusoidModel>& fit) {
  nlohmann::ordered_json j;
  j["model"] = "sinusoid";
  j["parameters"] = {{"offset", fit.model.offset},
                     {"amplitude", fit.model.amplitude},
                     {"period", fit.model.period},
                     {"phase", fit.model.phase}};
  j["standard_errors"] = {{"offset", number_or_null(fit.sigma.offset)},
                          {"amplitude", number_or_null(fit.sigma.amplitude)},
                          {"period", number_or_null(fit.sigma.period)},
                          {"phase", number_or_null(fit.sigma.phase)}};
  j.update(stats_json(fit.stats));
  return j;
}

nlohmann::ordered_json to_json(const FitResult<QuantumFringeModel>& fit) {
  nlohmann::ordered_json j;
  j["model"] = "quantum-fringe";
  j["parameters"] = {{"epsilon", fit.model.epsilon},
                     {"scale", fit.model.scale},
                     {"phase", fit.model.phase},
                     {"background", fit.model.background}};
  j["standard_errors"] = {{"epsilon", number_or_null(fit.sigma.epsilon)},
                          {"scale", number_or_null(fit.sigma.scale)},
                          {"phase", number_or_null(fit.sigma.phase)},
                          {"background", number_or_null(fit.sigma.background)}};
  j.update(stats_json(fit.stats));
  return j;
}

}  // namespace qpc
