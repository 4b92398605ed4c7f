// Circuit elements (directional couplers, phase shifters), circuit
// composition, and closed-form one- and two-photon output states of a coupler
// and of a Mach-Zehnder interferometer built from two identical couplers.
//
// Conventions: mode 0 is the upper waveguide, mode 1 the lower. A coupler with
// coupling ratio eps has transfer matrix
//     [ sqrt(1-eps)   i sqrt(eps) ]
//     [ i sqrt(eps)   sqrt(1-eps) ]
// and a phase shifter multiplies its mode by exp(-i theta).
#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "qpc/fock.hpp"

namespace qpc {

struct CouplerSpec {
  double epsilon = 0.5;
};

struct PhaseSpec {
  double theta = 0.0;
  std::size_t mode_index = 1;
};

/// Coupler acting on an ordered mode pair; `first` plays the role of the
/// upper waveguide in the 2x2 transfer matrix.
struct CouplerElement {
  CouplerSpec spec;
  std::size_t first = 0;
  std::size_t second = 1;
};

using CircuitElement = std::variant<CouplerElement, PhaseSpec>;

/// Elements listed in propagation order.
class CircuitPlan {
 public:
  explicit CircuitPlan(std::size_t mode_count);

  CircuitPlan& add_coupler(double epsilon, std::size_t first = 0, std::size_t second = 1);
  CircuitPlan& add_phase(double theta, std::size_t mode_index = 1);
  /// Throws RangeError if an element references a mode outside the circuit.
  CircuitPlan& add(const CircuitElement& element);

  std::size_t mode_count() const { return mode_count_; }
  const std::vector<CircuitElement>& elements() const { return elements_; }

 private:
  std::size_t mode_count_;
  std::vector<CircuitElement> elements_;
};

/// Throws RangeError unless 0 <= eps <= 1.
void check_coupling_ratio(double eps);

ModeUnitary coupler_unitary(const CouplerSpec& spec);
/// Coupler embedded into an identity on `mode_count` modes.
ModeUnitary coupler_unitary(const CouplerSpec& spec, std::size_t mode_count, std::size_t first,
                            std::size_t second);

ModeUnitary phase_unitary(const PhaseSpec& spec, std::size_t mode_count);

/// Ordered product of element unitaries; the first element acts first.
ModeUnitary compose(const CircuitPlan& plan);

/// coupler(eps) -> phase(theta, lower arm) -> coupler(eps).
CircuitPlan mzi_plan(double eps, double theta);

/// |10> through an MZI of two identical couplers:
///   [(1-2eps)cos(theta/2) + i sin(theta/2)] |10> + 2i sqrt(eps(1-eps)) cos(theta/2) |01>
/// This differs from the raw product compose(mzi_plan) |10> by the global phase
/// exp(-i theta/2).
PureState single_photon_mzi_state(double eps, double theta);

/// |11> through one coupler:
///   i sqrt(2 eps(1-eps)) (|20> + |02>) + (1-2eps) |11>
PureState two_photon_coupler_state(double eps);

/// |11> through an MZI of two identical couplers, lower-arm phase theta.
PureState two_photon_mzi_state(double eps, double theta);

}  // namespace qpc
