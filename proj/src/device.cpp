#include "qpc/device.hpp"

#include <cmath>
#include <string>

#include "qpc/error.hpp"

namespace qpc {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw RangeError(what);
}

}  // namespace

void MaterialParams::validate() const {
  require(n_core >= 1.0 && n_clad >= 1.0 && n_air >= 1.0, "refractive indices must be >= 1");
  require(r14 > 0.0, "r14 must be > 0");
  require(wavelength > 0.0, "wavelength must be > 0");
}

void CouplerGeometry::validate() const {
  require(gap > 0.0, "coupler gap must be > 0");
  require(length >= 0.0, "coupler length must be >= 0");
  require(kappa0 > 0.0, "kappa0 must be > 0");
  require(gamma >= 0.0, "gamma must be >= 0");
  require(std::isfinite(phase_offset), "phase_offset must be finite");
}

void ShifterGeometry::validate() const {
  require(length > 0.0, "shifter length must be > 0");
  require(v_pi > 0.0, "v_pi must be > 0");
  require(!electrode_gap || *electrode_gap > 0.0, "electrode gap must be > 0");
}

void LossBudget::validate() const {
  require(propagation_db_per_cm >= 0.0, "propagation loss must be >= 0 dB/cm");
  require(facet_coupling_db >= 0.0, "facet coupling loss must be >= 0 dB");
  require(chip_internal_db >= 0.0, "chip internal loss must be >= 0 dB");
}

double LossBudget::facet_transmission() const { return db_to_transmission(facet_coupling_db); }

double LossBudget::chip_transmission() const { return db_to_transmission(chip_internal_db); }

FresnelSplit fresnel_reflectance(double n1, double n2) {
  require(n1 >= 1.0 && n2 >= 1.0, "refractive indices must be >= 1");
  const double r = (n1 - n2) / (n1 + n2);
  const double reflectance = r * r;
  return {reflectance, 1.0 - reflectance};
}

double coupling_strength(const CouplerGeometry& geom) {
  return geom.kappa0 * std::exp(-geom.gamma * geom.gap);
}

double coupling_ratio(const CouplerGeometry& geom) {
  geom.validate();
  const double s = std::sin(coupling_strength(geom) * geom.length + geom.phase_offset);
  return s * s;
}

CouplingModel fit_coupling_model(const CouplingAnchor& a, const CouplingAnchor& b) {
  for (const auto* anchor : {&a, &b}) {
    require(anchor->gap > 0.0 && anchor->length > 0.0, "anchor gap and length must be > 0");
    require(anchor->epsilon > 0.0 && anchor->epsilon <= 1.0, "anchor epsilon must be in (0, 1]");
  }
  require(a.gap != b.gap, "anchors must have distinct gaps");
  const double kappa_a = std::asin(std::sqrt(a.epsilon)) / a.length;
  const double kappa_b = std::asin(std::sqrt(b.epsilon)) / b.length;
  const double gamma = std::log(kappa_a / kappa_b) / (b.gap - a.gap);
  require(gamma >= 0.0, "anchors imply coupling that grows with the gap");
  return {kappa_a * std::exp(gamma * a.gap), gamma};
}

double phase_from_voltage(double volts, const ShifterGeometry& geom, const MaterialParams& mat) {
  if (!geom.electrode_gap) throw StateError("shifter electrode gap is not calibrated");
  geom.validate();
  mat.validate();
  const double field = volts / *geom.electrode_gap;
  const double dn = std::pow(mat.n_core, 3) * mat.r14 * field / 2.0;
  return 2.0 * kPi * dn * geom.length / mat.wavelength;
}

double calibrate_electrode_gap(double v_pi, const ShifterGeometry& geom,
                               const MaterialParams& mat) {
  require(v_pi > 0.0, "v_pi must be > 0");
  require(geom.length > 0.0, "shifter length must be > 0");
  mat.validate();
  // A pi shift needs dn = lambda / (2 L).
  const double dn = mat.wavelength / (2.0 * geom.length);
  const double field = 2.0 * dn / (std::pow(mat.n_core, 3) * mat.r14);
  return v_pi / field;
}

ShifterGeometry calibrated(ShifterGeometry geom, const MaterialParams& mat) {
  geom.electrode_gap = calibrate_electrode_gap(geom.v_pi, geom, mat);
  return geom;
}

double db_to_transmission(double db) {
  require(db >= 0.0, "loss in dB must be >= 0, got " + std::to_string(db));
  return std::pow(10.0, -db / 10.0);
}

double delay_um_to_seconds(double delay_um) { return delay_um * 1e-6 / kSpeedOfLight; }

double seconds_to_delay_um(double seconds) { return seconds * kSpeedOfLight * 1e6; }

}  // namespace qpc
