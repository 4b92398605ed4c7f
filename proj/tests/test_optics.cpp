#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qpc/device.hpp"
#include "qpc/optics.hpp"

using qpc::Complex;
using qpc::FockState;
using qpc::PureState;
using qpc::kPi;

namespace {

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo + (hi - lo) * i / (n - 1));
  return v;
}

PureState from_oracle(const oracle::Amplitudes& amps) {
  PureState::TermMap terms;
  for (const auto& [occ, a] : amps) terms[FockState(occ)] = a;
  return PureState(2, terms);
}

}  // namespace

TEST(Coupler, MatrixEntries) {
  const auto u = qpc::coupler_unitary({0.3});
  const auto want = oracle::coupler(0.3);
  EXPECT_LT((u.matrix() - want).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(qpc::coupler_unitary({1.2}), qpc::RangeError);
  EXPECT_THROW(qpc::coupler_unitary({-0.1}), qpc::RangeError);
}

TEST(Coupler, EmbeddedActsOnChosenPair) {
  const auto u = qpc::coupler_unitary({0.25}, 4, 3, 1);
  EXPECT_NEAR(std::abs(u(3, 3)), std::sqrt(0.75), 1e-15);
  EXPECT_NEAR(std::abs(u(1, 3)), 0.5, 1e-15);
  EXPECT_EQ(u(0, 0), Complex(1.0));
  EXPECT_EQ(u(2, 2), Complex(1.0));
  EXPECT_THROW(qpc::coupler_unitary({0.5}, 3, 1, 1), qpc::RangeError);
  EXPECT_THROW(qpc::coupler_unitary({0.5}, 3, 0, 3), qpc::RangeError);
}

TEST(Phase, ActsOnLowerArm) {
  const auto p = qpc::phase_unitary({0.7, 1}, 2);
  EXPECT_EQ(p(0, 0), Complex(1.0));
  EXPECT_LT(std::abs(p(1, 1) - std::polar(1.0, -0.7)), 1e-15);
}

TEST(Compose, FirstElementActsFirst) {
  qpc::CircuitPlan plan(2);
  plan.add_coupler(0.2).add_phase(0.9).add_coupler(0.4);
  const auto u = qpc::compose(plan);
  Eigen::Matrix2cd p = Eigen::Matrix2cd::Identity();
  p(1, 1) = std::polar(1.0, -0.9);
  const Eigen::Matrix2cd want = oracle::coupler(0.4) * p * oracle::coupler(0.2);
  EXPECT_LT((u.matrix() - want).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((qpc::compose(qpc::mzi_plan(0.3, 1.1)).matrix() - oracle::mzi(0.3, 1.1)).cwiseAbs().maxCoeff(),
            1e-15);
}

TEST(CircuitPlan, ValidatesModes) {
  qpc::CircuitPlan plan(2);
  EXPECT_THROW(plan.add_phase(0.1, 2), qpc::RangeError);
  EXPECT_THROW(plan.add_coupler(0.5, 0, 2), qpc::RangeError);
  EXPECT_THROW(plan.add_coupler(1.5), qpc::RangeError);
  EXPECT_TRUE(plan.elements().empty());
  EXPECT_EQ(qpc::compose(plan).matrix(), qpc::ModeUnitary::identity(2).matrix());
}

// The closed forms are checked against the generic evolution and against the
// creation-operator expansion of the hand-written transfer matrices.
TEST(ClosedForms, SinglePhotonMziOnGrid) {
  for (double eps : grid(0.0, 1.0, 20)) {
    for (double theta : grid(0.0, 2.0 * kPi, 20)) {
      const auto closed = qpc::single_photon_mzi_state(eps, theta);
      const auto evolved = qpc::evolve(PureState::basis(FockState{1, 0}), qpc::compose(qpc::mzi_plan(eps, theta)));
      EXPECT_LT(qpc::max_amplitude_distance_up_to_phase(closed, evolved), 1e-12);
      // The closed form drops exactly the global phase exp(-i theta / 2).
      EXPECT_LT(qpc::max_amplitude_distance(closed.scaled(std::polar(1.0, -theta / 2.0)), evolved), 1e-12);
    }
  }
}

TEST(ClosedForms, TwoPhotonCouplerOnGrid) {
  for (double eps : grid(0.0, 1.0, 20)) {
    const auto closed = qpc::two_photon_coupler_state(eps);
    const auto want = from_oracle(oracle::expand_creation_operators(oracle::coupler(eps), {1, 1}));
    EXPECT_LT(qpc::max_amplitude_distance(closed, want), 1e-12);
    EXPECT_NEAR(closed.norm_squared(), 1.0, 1e-12);
  }
}

TEST(ClosedForms, TwoPhotonMziOnGrid) {
  for (double eps : grid(0.0, 1.0, 20)) {
    for (double theta : grid(0.0, 2.0 * kPi, 20)) {
      const auto closed = qpc::two_photon_mzi_state(eps, theta);
      const auto want = from_oracle(oracle::expand_creation_operators(oracle::mzi(eps, theta), {1, 1}));
      const auto evolved = qpc::evolve(PureState::basis(FockState{1, 1}), qpc::compose(qpc::mzi_plan(eps, theta)));
      EXPECT_LT(qpc::max_amplitude_distance(closed, want), 1e-12);
      EXPECT_LT(qpc::max_amplitude_distance_up_to_phase(closed, evolved), 1e-12);
    }
  }
}

TEST(ClosedForms, KnownCouplerValues) {
  const auto s = qpc::two_photon_coupler_state(0.3);
  EXPECT_NEAR(s.amplitude(FockState{2, 0}).imag(), std::sqrt(0.42), 1e-15);
  EXPECT_NEAR(s.amplitude(FockState{2, 0}).imag(), 0.6480740698407860, 1e-12);
  EXPECT_NEAR(s.amplitude(FockState{0, 2}).imag(), 0.6480740698407860, 1e-12);
  EXPECT_NEAR(s.amplitude(FockState{1, 1}).real(), 0.4, 1e-15);

  const auto hom = qpc::two_photon_coupler_state(0.5);
  EXPECT_LE(qpc::coincidence_probability(hom, FockState{1, 1}), 1e-30);
  EXPECT_NEAR(qpc::coincidence_probability(hom, FockState{2, 0}), 0.5, 1e-15);
  EXPECT_NEAR(qpc::coincidence_probability(hom, FockState{0, 2}), 0.5, 1e-15);
}

TEST(ClosedForms, MziAtZeroCouplingIsIdentityUpToPhase) {
  const auto s = qpc::single_photon_mzi_state(0.0, 0.8);
  EXPECT_NEAR(std::norm(s.amplitude(FockState{1, 0})), 1.0, 1e-15);
  EXPECT_EQ(s.amplitude(FockState{0, 1}), Complex(0.0));
}
