// Closed-form interference observables: HOM dip profiles, classical and
// two-photon MZI fringes, and visibility conventions.
#pragma once

#include <utility>
#include <vector>

namespace qpc {

enum class SpectrumKind { kTriangularSinc2, kNumeric };

struct SpectralSample {
  double omega;      // angular frequency offset, rad/s
  double amplitude;  // non-negative spectral density
};

/// Photon spectrum entering the two-photon overlap. For kTriangularSinc2 the
/// overlap is the triangle max(0, 1 - |tau|/coherence_time); for kNumeric it is
/// the modulus of the Fourier transform of the sampled spectrum.
struct SpectralModel {
  SpectrumKind kind = SpectrumKind::kTriangularSinc2;
  double coherence_time = 0.73e-12;  // s
  std::vector<SpectralSample> samples;  // kNumeric only, omega strictly increasing

  static SpectralModel triangular(double coherence_time);
  /// Normalizes the samples to unit trapezoid area.
  static SpectralModel numeric(std::vector<SpectralSample> samples);

  void validate() const;
};

/// Sampled sinc^2(omega tau_c / 2) spectrum, whose Fourier transform is the
/// triangular kernel of width tau_c. Sampled on |omega tau_c / 2| <= x_max.
SpectralModel sinc2_spectrum(double coherence_time, double x_max, std::size_t samples);

/// Two-photon overlap g(tau) in [0, 1]; g(0) = 1.
double overlap_kernel(double delay_s, const SpectralModel& model);

/// Curve over a strictly increasing control variable.
struct Curve {
  std::vector<double> control;
  std::vector<double> value;
};

/// Dip depth of coincidences for indistinguishable vs distinguishable photon
/// pairs on a coupler: 2 eps (1-eps) / (eps^2 + (1-eps)^2).
double hom_visibility(double eps);

/// Coincidence probability for a distinguishable pair, eps^2 + (1-eps)^2.
double distinguishable_coincidence_probability(double eps);

/// Normalized coincidences C/C_shoulder = 1 - v_cap V(eps) g(tau) over
/// free-space delays in micrometres.
Curve hom_dip_profile(const std::vector<double>& delays_um, double eps, const SpectralModel& model,
                      double v_cap);

/// Shoulder-to-shoulder free-space width (um) of a triangular dip.
double dip_full_width_um(double coherence_time);

/// Coherence length inside a medium of index n (um).
double coherence_length_um(double coherence_time, double n);

/// Normalized MZI outputs for a single photon or bright light:
///   out1 = (1-2eps)^2 cos^2(theta/2) + sin^2(theta/2)
///   out2 = 4 eps (1-eps) cos^2(theta/2)
std::pair<Curve, Curve> classical_fringe(double eps, const std::vector<double>& thetas);

/// Two-photon coincidence probability at the MZI output plus a constant
/// phase-independent background.
double quantum_fringe_value(double eps, double theta, double tm_background = 0.0);
Curve quantum_fringe(double eps, const std::vector<double>& thetas, double tm_background = 0.0);

/// (max - min) / (max + min).
double fringe_visibility(double max_value, double min_value);
/// (max - min) / max.
double dip_visibility(double max_value, double min_value);

enum class VisibilityConvention { kDip, kFringe };

/// Visibility of the extrema of `values` under `convention`.
double curve_visibility(const std::vector<double>& values,
                        VisibilityConvention convention = VisibilityConvention::kFringe);

}  // namespace qpc
