// Counting-experiment simulation: absolute rates from model probabilities,
// Poisson sampling of singles and coincidences, accidental estimation and
// subtraction, and sweep records with their CSV/JSON forms.
#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpc/device.hpp"

namespace qpc {

struct DetectorSpec {
  double efficiency = 0.01;
  double dark_rate = 1e3;  // Hz

  bool operator==(const DetectorSpec&) const = default;
};

/// Defaults: SPDC pair rate, the superconducting detector pair (1% and 4%)
/// and a >5 ns coincidence window.
struct CountingConfig {
  double pair_rate = 2e6;          // Hz
  double integration_time = 30.0;  // s per sweep point; peak near 750 counts
  double coincidence_window = 5e-9;  // s
  std::array<DetectorSpec, 2> detectors{DetectorSpec{0.01, 1e3}, DetectorSpec{0.04, 1e3}};
  LossBudget losses;
  std::uint64_t rng_seed = 1;

  /// Throws RangeError naming the offending field.
  void validate() const;
  bool operator==(const CountingConfig&) const = default;
};

struct SweepPoint {
  double control = 0.0;
  double raw = 0.0;
  double singles1 = 0.0;
  double singles2 = 0.0;
  double accidental = 0.0;
  double corrected = 0.0;
  double error = 0.0;

  bool operator==(const SweepPoint&) const = default;
};

/// One row per control value; counts are per point over the integration time.
struct SweepRecord {
  std::vector<SweepPoint> points;

  bool operator==(const SweepRecord&) const = default;
};

inline constexpr const char* kSweepCsvHeader =
    "control,raw,singles1,singles2,accidental,corrected,error";

/// s1 * s2 * window.
double accidental_rate(double s1, double s2, double window);

/// pair_rate * eta_c^2 * eta * efficiency + dark_rate for detector 0 or 1.
double singles_rate(const CountingConfig& cfg, std::size_t detector);

/// pair_rate * eta_c^4 * eta^2 * eta_d1 * eta_d2 * model_prob.
double expected_coincidence_rate(double model_prob, const CountingConfig& cfg);

using ProbabilityFn = std::function<double(double control)>;

/// Simulates one Poisson-sampled record. Point i draws from its own generator
/// seeded by (rng_seed, i), so the result does not depend on `threads`.
SweepRecord simulate_sweep(const std::vector<double>& control, const ProbabilityFn& prob_fn,
                           const CountingConfig& cfg, unsigned threads = 1);

/// corrected = raw - accidental (not clamped), error = sqrt(raw).
SweepRecord subtract_accidentals(SweepRecord rec);

void write_csv(std::ostream& os, const SweepRecord& rec);
/// Expects the kSweepCsvHeader column layout. Throws std::runtime_error on
/// malformed input.
SweepRecord read_csv(std::istream& is);

/// Column-oriented object: {"control": [...], "raw": [...], ...}.
nlohmann::ordered_json to_json(const SweepRecord& rec);
SweepRecord sweep_record_from_json(const nlohmann::ordered_json& j);

}  // namespace qpc
