// Extra coincidences from first-order facet round trips in a 50:50 coupler
// chip, and the resulting loss of HOM dip visibility.
//
// One photon of the pair (photon B) may be reflected at an output facet,
// travel back through the coupler, reflect again at the input facets and exit
// after a third chip pass. The return trip is an MZI-like interference whose
// phase is the difference delta_phi between the two input access waveguides:
// the photon leaves through the other port with probability cos^2(delta_phi/2).
// Higher-order round trips carry an extra R^2 eta^2 factor and are neglected.
#pragma once

#include "qpc/device.hpp"

namespace qpc {

struct ReflectionParams {
  double pair_rate = 2e6;  // Hz
  double reflectance = 0.3;
  double transmittance = 0.7;
  double eta_c = 0.7079457843841379;  // fibre coupling per facet (power)
  double eta = 0.5011872336272722;    // single chip pass (power)
  double delta_phi = 0.0;             // rad
  double eta_d1 = 1.0;
  double eta_d2 = 1.0;

  /// Reflectance from the Fresnel formula at a core/air facet and
  /// transmissions from the loss budget.
  static ReflectionParams from_device(const MaterialParams& mat, const LossBudget& loss,
                                      double pair_rate = 2e6, double delta_phi = 0.0,
                                      double eta_d1 = 1.0, double eta_d2 = 1.0);

  /// Throws RangeError on any invariant violation (R + T != 1 beyond 1e-12,
  /// efficiencies outside (0, 1], non-positive pair rate).
  void validate() const;
};

/// N R^2 T^4 eta_c^4 eta^4 cos^2(delta_phi/2) eta_d1 eta_d2.
double dip_coincidence_rate(const ReflectionParams& p);

/// N [T^4 eta_c^4 eta^2 / 2 + R^2 T^4 eta_c^4 eta^4 / 2] eta_d1 eta_d2; the
/// sin^2 and cos^2 first-order branches sum to a phase-independent term.
double shoulder_coincidence_rate(const ReflectionParams& p);

/// dip / shoulder = 2 R^2 eta^2 cos^2(delta_phi/2) / (1 + R^2 eta^2).
double visibility_degradation(const ReflectionParams& p);

struct DegradationRange {
  double min;
  double max;
};

/// Extremes of visibility_degradation over delta_phi in [0, 2 pi].
DegradationRange degradation_range(ReflectionParams p);

/// Smallest delta_phi in [0, pi] producing `degradation`. Throws RangeError if
/// the target is outside the attainable range.
double phase_for_degradation(ReflectionParams p, double degradation);

}  // namespace qpc
