#include "qpc/reflection.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qpc/error.hpp"

namespace qpc {

namespace {

bool is_efficiency(double x) { return x > 0.0 && x <= 1.0; }

}  // namespace

ReflectionParams ReflectionParams::from_device(const MaterialParams& mat, const LossBudget& loss,
                                               double pair_rate, double delta_phi, double eta_d1,
                                               double eta_d2) {
  const auto split = fresnel_reflectance(mat.n_core, mat.n_air);
  ReflectionParams p;
  p.pair_rate = pair_rate;
  p.reflectance = split.reflectance;
  p.transmittance = split.transmittance;
  p.eta_c = loss.facet_transmission();
  p.eta = loss.chip_transmission();
  p.delta_phi = delta_phi;
  p.eta_d1 = eta_d1;
  p.eta_d2 = eta_d2;
  p.validate();
  return p;
}

void ReflectionParams::validate() const {
  if (!(pair_rate > 0.0)) throw RangeError("pair_rate must be > 0");
  if (!(reflectance >= 0.0 && reflectance < 1.0)) throw RangeError("reflectance must be in [0, 1)");
  if (std::abs(reflectance + transmittance - 1.0) > 1e-12) {
    throw RangeError("reflectance + transmittance must equal 1");
  }
  if (!is_efficiency(eta_c)) throw RangeError("eta_c must be in (0, 1]");
  if (!is_efficiency(eta)) throw RangeError("eta must be in (0, 1]");
  if (!is_efficiency(eta_d1)) throw RangeError("eta_d1 must be in (0, 1]");
  if (!is_efficiency(eta_d2)) throw RangeError("eta_d2 must be in (0, 1]");
  if (!std::isfinite(delta_phi)) throw RangeError("delta_phi must be finite");
}

double dip_coincidence_rate(const ReflectionParams& p) {
  p.validate();
  const double R = p.reflectance;
  const double T = p.transmittance;
  const double c = std::cos(p.delta_phi / 2.0);
  return p.pair_rate * R * R * std::pow(T, 4) * std::pow(p.eta_c, 4) * std::pow(p.eta, 4) * c * c *
         p.eta_d1 * p.eta_d2;
}

double shoulder_coincidence_rate(const ReflectionParams& p) {
  p.validate();
  const double R = p.reflectance;
  const double T = p.transmittance;
  const double s = std::sin(p.delta_phi / 2.0);
  const double c = std::cos(p.delta_phi / 2.0);
  const double facets = std::pow(T, 4) * std::pow(p.eta_c, 4);
  const double zero_order = facets * p.eta * p.eta / 2.0;
  const double round_trip = R * R * facets * std::pow(p.eta, 4) / 2.0;
  return p.pair_rate * (zero_order + s * s * round_trip + c * c * round_trip) * p.eta_d1 *
         p.eta_d2;
}

double visibility_degradation(const ReflectionParams& p) {
  const double shoulder = shoulder_coincidence_rate(p);
  if (shoulder == 0.0) throw RangeError("shoulder coincidence rate is zero");
  return dip_coincidence_rate(p) / shoulder;
}

DegradationRange degradation_range(ReflectionParams p) {
  // cos^2(delta_phi/2) spans [0, 1]; the extremes sit at delta_phi = pi and 0.
  p.delta_phi = kPi;
  const double lo = visibility_degradation(p);
  p.delta_phi = 0.0;
  const double hi = visibility_degradation(p);
  return {lo, hi};
}

double phase_for_degradation(ReflectionParams p, double degradation) {
  const auto range = degradation_range(p);
  // range.min is zero up to rounding; accept targets that close to either end
  const double slack = 1e-12 * std::max(range.max, 1e-300);
  if (std::abs(degradation - range.min) <= slack) degradation = range.min;
  if (std::abs(degradation - range.max) <= slack) degradation = range.max;
  if (!(degradation >= range.min && degradation <= range.max) || range.max == 0.0) {
    throw RangeError("degradation " + std::to_string(degradation) + " outside [" +
                     std::to_string(range.min) + ", " + std::to_string(range.max) + "]");
  }
  const double cos2 = std::clamp(degradation / range.max, 0.0, 1.0);
  return 2.0 * std::acos(std::sqrt(cos2));
}

}  // namespace qpc
