// Physical device parameters and their mapping onto the abstract circuit
// parameters: coupling ratio, phase, facet reflectance, power transmissions.
#pragma once

#include <optional>

namespace qpc {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// GaAs core / Al(0.3)Ga(0.7)As cladding at 1550 nm.
struct MaterialParams {
  double n_core = 3.431;
  double n_clad = 3.282;
  double n_air = 1.0;
  double r14 = 1.4e-12;         // m/V
  double wavelength = 1550e-9;  // m

  void validate() const;
  bool operator==(const MaterialParams&) const = default;
};

/// Coupled-waveguide section. Lengths in micrometres.
///
/// The coupling ratio follows eps = sin^2(kappa(gap) * length + phase_offset)
/// with kappa(gap) = kappa0 * exp(-gamma * gap). The defaults are the two
/// parameters solved from the measured anchors (gap 2.5 um / 140 um -> 0.5,
/// gap 3.0 um / 255 um -> 0.3), and the default gap/length are those of the
/// MZI couplers.
struct CouplerGeometry {
  double gap = 3.0;       // um
  double length = 255.0;  // um
  double kappa0 = 0.5136664609432641;  // rad/um
  double gamma = 1.8068103060199092;   // 1/um
  double phase_offset = 0.0;           // rad

  void validate() const;
  bool operator==(const CouplerGeometry&) const = default;
};

/// Electro-optic phase shifter. SI units.
struct ShifterGeometry {
  double length = 0.01;  // m
  std::optional<double> electrode_gap;  // m, unset until calibrated
  double v_pi = 13.0;                   // V

  void validate() const;
  bool operator==(const ShifterGeometry&) const = default;
};

struct LossBudget {
  double propagation_db_per_cm = 1.6;
  double facet_coupling_db = 1.5;
  double chip_internal_db = 3.0;

  void validate() const;
  /// Power transmission of one fibre-to-facet coupling.
  double facet_transmission() const;
  /// Power transmission of one pass through the chip.
  double chip_transmission() const;
  bool operator==(const LossBudget&) const = default;
};

struct FresnelSplit {
  double reflectance;
  double transmittance;
};

/// Normal-incidence power reflectance ((n1-n2)/(n1+n2))^2 and T = 1 - R.
/// Throws RangeError for indices below 1.
FresnelSplit fresnel_reflectance(double n1, double n2);

/// Coupling strength at `gap` in rad/um.
double coupling_strength(const CouplerGeometry& geom);

/// eps = sin^2(kappa * L + offset), always in [0, 1].
double coupling_ratio(const CouplerGeometry& geom);

struct CouplingAnchor {
  double gap;      // um
  double length;   // um
  double epsilon;  // measured coupling ratio, in (0, 1]
};

struct CouplingModel {
  double kappa0;  // rad/um
  double gamma;   // 1/um
};

/// Solves kappa0, gamma (zero phase offset) so that both anchors lie on the
/// first rising branch of sin^2(kappa L). Throws RangeError if the anchors
/// share a gap or fall outside the model's domain.
CouplingModel fit_coupling_model(const CouplingAnchor& a, const CouplingAnchor& b);

/// Relative phase from the Pockels index change dn = n^3 r14 E / 2 over the
/// shifter length, with E = V / electrode_gap. Linear in V.
/// Throws StateError if the electrode gap has not been calibrated.
double phase_from_voltage(double volts, const ShifterGeometry& geom, const MaterialParams& mat);

/// Effective electrode gap d for which phase_from_voltage(v_pi) = pi.
double calibrate_electrode_gap(double v_pi, const ShifterGeometry& geom,
                               const MaterialParams& mat);

/// Copy of `geom` with its electrode gap calibrated to geom.v_pi.
ShifterGeometry calibrated(ShifterGeometry geom, const MaterialParams& mat);

/// 10^(-db/10). Throws RangeError for negative dB.
double db_to_transmission(double db);

/// Free-space path difference (um) corresponding to a delay in seconds, and back.
double delay_um_to_seconds(double delay_um);
double seconds_to_delay_um(double seconds);

}  // namespace qpc
