#include "qpc/interference.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "qpc/device.hpp"
#include "qpc/error.hpp"
#include "qpc/optics.hpp"

namespace qpc {

namespace {

void check_increasing(const std::vector<double>& control) {
  for (std::size_t i = 1; i < control.size(); ++i) {
    if (!(control[i] > control[i - 1])) {
      throw RangeError("curve control values must be strictly increasing");
    }
  }
}

double trapezoid_area(const std::vector<SpectralSample>& s) {
  double area = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    area += 0.5 * (s[i].amplitude + s[i - 1].amplitude) * (s[i].omega - s[i - 1].omega);
  }
  return area;
}

}  // namespace

SpectralModel SpectralModel::triangular(double coherence_time) {
  SpectralModel m;
  m.kind = SpectrumKind::kTriangularSinc2;
  m.coherence_time = coherence_time;
  m.validate();
  return m;
}

SpectralModel SpectralModel::numeric(std::vector<SpectralSample> samples) {
  if (samples.size() < 2) throw RangeError("numeric spectrum needs at least two samples");
  SpectralModel m;
  m.kind = SpectrumKind::kNumeric;
  m.samples = std::move(samples);
  const double area = trapezoid_area(m.samples);
  if (!(area > 0.0)) throw RangeError("numeric spectrum has zero area");
  for (auto& s : m.samples) s.amplitude /= area;
  m.validate();
  return m;
}

void SpectralModel::validate() const {
  if (!(coherence_time > 0.0)) throw RangeError("coherence_time must be > 0");
  if (kind != SpectrumKind::kNumeric) return;
  if (samples.size() < 2) throw RangeError("numeric spectrum needs at least two samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].amplitude < 0.0) throw RangeError("spectral amplitudes must be non-negative");
    if (i > 0 && !(samples[i].omega > samples[i - 1].omega)) {
      throw RangeError("spectral frequencies must be strictly increasing");
    }
  }
}

SpectralModel sinc2_spectrum(double coherence_time, double x_max, std::size_t samples) {
  if (!(coherence_time > 0.0) || !(x_max > 0.0) || samples < 3) {
    throw RangeError("sinc2 spectrum needs positive width, range and >= 3 samples");
  }
  std::vector<SpectralSample> s(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double x = -x_max + 2.0 * x_max * static_cast<double>(i) / static_cast<double>(samples - 1);
    const double sinc = x == 0.0 ? 1.0 : std::sin(x) / x;
    s[i] = {2.0 * x / coherence_time, sinc * sinc};
  }
  auto model = SpectralModel::numeric(std::move(s));
  model.coherence_time = coherence_time;
  return model;
}

double overlap_kernel(double delay_s, const SpectralModel& model) {
  model.validate();
  if (model.kind == SpectrumKind::kTriangularSinc2) {
    return std::max(0.0, 1.0 - std::abs(delay_s) / model.coherence_time);
  }
  const auto& s = model.samples;
  std::complex<double> acc{};
  std::complex<double> prev = s[0].amplitude * std::polar(1.0, s[0].omega * delay_s);
  for (std::size_t i = 1; i < s.size(); ++i) {
    const std::complex<double> cur = s[i].amplitude * std::polar(1.0, s[i].omega * delay_s);
    acc += 0.5 * (cur + prev) * (s[i].omega - s[i - 1].omega);
    prev = cur;
  }
  return std::min(1.0, std::abs(acc));
}

double distinguishable_coincidence_probability(double eps) {
  check_coupling_ratio(eps);
  return eps * eps + (1.0 - eps) * (1.0 - eps);
}

double hom_visibility(double eps) {
  return 2.0 * eps * (1.0 - eps) / distinguishable_coincidence_probability(eps);
}

Curve hom_dip_profile(const std::vector<double>& delays_um, double eps, const SpectralModel& model,
                      double v_cap) {
  if (!(v_cap >= 0.0 && v_cap <= 1.0)) throw RangeError("v_cap must lie in [0, 1]");
  check_increasing(delays_um);
  const double depth = v_cap * hom_visibility(eps);
  Curve c;
  c.control = delays_um;
  c.value.reserve(delays_um.size());
  for (double x : delays_um) {
    c.value.push_back(1.0 - depth * overlap_kernel(delay_um_to_seconds(x), model));
  }
  return c;
}

double dip_full_width_um(double coherence_time) {
  return 2.0 * seconds_to_delay_um(coherence_time);
}

double coherence_length_um(double coherence_time, double n) {
  if (!(n >= 1.0)) throw RangeError("refractive index must be >= 1");
  return seconds_to_delay_um(coherence_time) / n;
}

std::pair<Curve, Curve> classical_fringe(double eps, const std::vector<double>& thetas) {
  check_coupling_ratio(eps);
  check_increasing(thetas);
  Curve out1{thetas, {}};
  Curve out2{thetas, {}};
  const double imbalance = (1.0 - 2.0 * eps) * (1.0 - 2.0 * eps);
  const double split = 4.0 * eps * (1.0 - eps);
  for (double theta : thetas) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    out1.value.push_back(imbalance * c * c + s * s);
    out2.value.push_back(split * c * c);
  }
  return {std::move(out1), std::move(out2)};
}

double quantum_fringe_value(double eps, double theta, double tm_background) {
  check_coupling_ratio(eps);
  if (!(tm_background >= 0.0)) throw RangeError("tm_background must be >= 0");
  const double split = 2.0 * eps * (1.0 - eps);
  const double imbalance = 1.0 - 2.0 * eps;
  const std::complex<double> amp = -split * std::polar(1.0, -2.0 * theta) +
                                   imbalance * imbalance * std::polar(1.0, -theta) - split;
  return std::norm(amp) + tm_background;
}

Curve quantum_fringe(double eps, const std::vector<double>& thetas, double tm_background) {
  check_increasing(thetas);
  Curve c{thetas, {}};
  c.value.reserve(thetas.size());
  for (double theta : thetas) c.value.push_back(quantum_fringe_value(eps, theta, tm_background));
  return c;
}

double fringe_visibility(double max_value, double min_value) {
  const double sum = max_value + min_value;
  if (sum == 0.0) throw RangeError("fringe visibility undefined for an all-zero curve");
  return (max_value - min_value) / sum;
}

double dip_visibility(double max_value, double min_value) {
  if (max_value == 0.0) throw RangeError("dip visibility undefined for a zero maximum");
  return (max_value - min_value) / max_value;
}

double curve_visibility(const std::vector<double>& values, VisibilityConvention convention) {
  if (values.empty()) throw RangeError("visibility of an empty curve");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return convention == VisibilityConvention::kDip ? dip_visibility(*hi, *lo)
                                                  : fringe_visibility(*hi, *lo);
}

}  // namespace qpc
