#include "qpc/optics.hpp"

#include <cmath>
#include <string>

namespace qpc {

namespace {

constexpr Complex kI{0.0, 1.0};

void check_mode(std::size_t mode, std::size_t mode_count) {
  if (mode >= mode_count) {
    throw RangeError("mode index " + std::to_string(mode) + " outside a " +
                     std::to_string(mode_count) + "-mode circuit");
  }
}

}  // namespace

void check_coupling_ratio(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) {
    throw RangeError("coupling ratio epsilon must lie in [0, 1], got " + std::to_string(eps));
  }
}

CircuitPlan::CircuitPlan(std::size_t mode_count) : mode_count_(mode_count) {
  if (mode_count_ == 0) throw DimensionError("circuit needs at least one mode");
}

CircuitPlan& CircuitPlan::add_coupler(double epsilon, std::size_t first, std::size_t second) {
  return add(CouplerElement{CouplerSpec{epsilon}, first, second});
}

CircuitPlan& CircuitPlan::add_phase(double theta, std::size_t mode_index) {
  return add(PhaseSpec{theta, mode_index});
}

CircuitPlan& CircuitPlan::add(const CircuitElement& element) {
  if (const auto* c = std::get_if<CouplerElement>(&element)) {
    check_coupling_ratio(c->spec.epsilon);
    check_mode(c->first, mode_count_);
    check_mode(c->second, mode_count_);
    if (c->first == c->second) throw RangeError("coupler needs two distinct modes");
  } else {
    check_mode(std::get<PhaseSpec>(element).mode_index, mode_count_);
  }
  elements_.push_back(element);
  return *this;
}

ModeUnitary coupler_unitary(const CouplerSpec& spec) {
  return coupler_unitary(spec, 2, 0, 1);
}

ModeUnitary coupler_unitary(const CouplerSpec& spec, std::size_t mode_count, std::size_t first,
                            std::size_t second) {
  check_coupling_ratio(spec.epsilon);
  check_mode(first, mode_count);
  check_mode(second, mode_count);
  if (first == second) throw RangeError("coupler needs two distinct modes");
  const auto n = static_cast<Eigen::Index>(mode_count);
  const auto a = static_cast<Eigen::Index>(first);
  const auto b = static_cast<Eigen::Index>(second);
  ComplexMatrix m = ComplexMatrix::Identity(n, n);
  const double through = std::sqrt(1.0 - spec.epsilon);
  const Complex cross = kI * std::sqrt(spec.epsilon);
  m(a, a) = through;
  m(b, b) = through;
  m(a, b) = cross;
  m(b, a) = cross;
  return ModeUnitary(std::move(m));
}

ModeUnitary phase_unitary(const PhaseSpec& spec, std::size_t mode_count) {
  check_mode(spec.mode_index, mode_count);
  const auto n = static_cast<Eigen::Index>(mode_count);
  ComplexMatrix m = ComplexMatrix::Identity(n, n);
  const auto k = static_cast<Eigen::Index>(spec.mode_index);
  m(k, k) = std::polar(1.0, -spec.theta);
  return ModeUnitary(std::move(m));
}

ModeUnitary compose(const CircuitPlan& plan) {
  ModeUnitary total = ModeUnitary::identity(plan.mode_count());
  for (const auto& element : plan.elements()) {
    if (const auto* c = std::get_if<CouplerElement>(&element)) {
      total = coupler_unitary(c->spec, plan.mode_count(), c->first, c->second) * total;
    } else {
      total = phase_unitary(std::get<PhaseSpec>(element), plan.mode_count()) * total;
    }
  }
  return total;
}

CircuitPlan mzi_plan(double eps, double theta) {
  CircuitPlan plan(2);
  plan.add_coupler(eps).add_phase(theta, 1).add_coupler(eps);
  return plan;
}

PureState single_photon_mzi_state(double eps, double theta) {
  check_coupling_ratio(eps);
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  return PureState(2, {
                          {FockState{1, 0}, Complex{(1.0 - 2.0 * eps) * c, s}},
                          {FockState{0, 1}, kI * (2.0 * std::sqrt(eps * (1.0 - eps)) * c)},
                      });
}

PureState two_photon_coupler_state(double eps) {
  check_coupling_ratio(eps);
  const Complex bunched = kI * std::sqrt(2.0 * eps * (1.0 - eps));
  return PureState(2, {
                          {FockState{2, 0}, bunched},
                          {FockState{0, 2}, bunched},
                          {FockState{1, 1}, Complex{1.0 - 2.0 * eps, 0.0}},
                      });
}

PureState two_photon_mzi_state(double eps, double theta) {
  check_coupling_ratio(eps);
  const Complex e1 = std::polar(1.0, -theta);
  const Complex e2 = std::polar(1.0, -2.0 * theta);
  const Complex pre = kI * std::sqrt(2.0 * eps * (1.0 - eps));
  const double split = 2.0 * eps * (1.0 - eps);
  const double imbalance = 1.0 - 2.0 * eps;
  return PureState(
      2, {
             {FockState{2, 0}, pre * (-eps * e2 + imbalance * e1 + (1.0 - eps))},
             {FockState{0, 2}, pre * ((1.0 - eps) * e2 + imbalance * e1 - eps)},
             {FockState{1, 1}, -split * e2 + imbalance * imbalance * e1 - split},
         });
}

}  // namespace qpc
