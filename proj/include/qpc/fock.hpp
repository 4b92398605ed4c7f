// Fock-state representation and linear-optical evolution of few-photon states.
//
// A linear-optical circuit on m waveguide modes is described by an m x m
// unitary U acting on creation operators as a_i^+ -> sum_j U(j, i) a_j^+.
// Transition amplitudes between occupation patterns are matrix permanents of
// row/column-repeated submatrices of U. Everything here is exact up to
// floating-point rounding and intended for desk-scale problems (a handful of
// photons over a handful of modes).
#pragma once

#include <complex>
#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qpc/error.hpp"

namespace qpc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

/// Amplitudes smaller than this in magnitude are dropped from state maps.
inline constexpr double kAmplitudePruneThreshold = 1e-14;

/// Maximum element-wise deviation of U U^+ from identity accepted as unitary.
inline constexpr double kUnitarityTolerance = 1e-12;

/// Occupation numbers per waveguide mode, ordered top-to-bottom.
class FockState {
 public:
  explicit FockState(std::vector<int> occupations);
  FockState(std::initializer_list<int> occupations)
      : FockState(std::vector<int>(occupations)) {}

  std::size_t mode_count() const { return occupations_.size(); }
  int photon_count() const { return photons_; }
  int operator[](std::size_t mode) const { return occupations_.at(mode); }
  const std::vector<int>& occupations() const { return occupations_; }

  /// "|1,1>" style ket label; single-digit occupations are packed ("|11>").
  std::string ket() const;

  auto operator<=>(const FockState& other) const {
    return occupations_ <=> other.occupations_;
  }
  bool operator==(const FockState& other) const = default;

 private:
  std::vector<int> occupations_;
  int photons_ = 0;
};

/// All occupation patterns of `photons` photons over `modes` modes, in
/// lexicographically descending order (|20>, |11>, |02> for two modes).
std::vector<FockState> fock_basis(std::size_t modes, int photons);

/// Coherent superposition of Fock states sharing mode count and photon number.
class PureState {
 public:
  using TermMap = std::map<FockState, Complex>;

  PureState(std::size_t mode_count, TermMap terms);

  static PureState basis(const FockState& ket);

  std::size_t mode_count() const { return mode_count_; }
  /// Zero for the empty (null) vector.
  int photon_count() const { return photons_; }
  const TermMap& terms() const { return terms_; }

  Complex amplitude(const FockState& ket) const;
  double norm_squared() const;

  PureState scaled(Complex factor) const;
  PureState normalized() const;

  /// Same ray with the largest-magnitude amplitude rotated to be real and
  /// positive. Ties within 1e-9 resolve to the first ket in basis order.
  PureState with_canonical_phase() const;

 private:
  std::size_t mode_count_;
  int photons_ = 0;
  TermMap terms_;
};

/// Sum of two states over the same modes and photon number.
PureState operator+(const PureState& a, const PureState& b);

/// Largest |a_k - e^{i phi} b_k| over the union of kets, with phi chosen to
/// align b with a (the phase of <b|a>).
double max_amplitude_distance_up_to_phase(const PureState& a, const PureState& b);

/// Largest |a_k - b_k| over the union of kets (no phase freedom).
double max_amplitude_distance(const PureState& a, const PureState& b);

/// Square complex matrix with U U^+ = I within kUnitarityTolerance.
class ModeUnitary {
 public:
  /// Throws NonUnitaryError if the matrix is not unitary within `tolerance`.
  explicit ModeUnitary(ComplexMatrix entries, double tolerance = kUnitarityTolerance);

  static ModeUnitary identity(std::size_t modes);

  std::size_t mode_count() const { return static_cast<std::size_t>(entries_.rows()); }
  const ComplexMatrix& matrix() const { return entries_; }
  Complex operator()(std::size_t row, std::size_t col) const { return entries_(row, col); }

  /// Product `*this * other`: apply `other` first, then `*this`.
  ModeUnitary operator*(const ModeUnitary& other) const;

 private:
  ComplexMatrix entries_;
};

/// Largest |(U U^+ - I)_ij|.
double unitarity_deviation(const ComplexMatrix& m);

/// Matrix permanent by Ryser's formula with Gray-code updates.
/// The 0 x 0 permanent is 1. Throws DimensionError for non-square input.
Complex permanent(const ComplexMatrix& m);

/// Evolves `state` through the circuit `u`. Linear in the input amplitudes and
/// photon-number preserving; lossless, so unit-norm inputs stay unit norm.
/// Throws DimensionError on a mode-count mismatch.
PureState evolve(const PureState& state, const ModeUnitary& u);

/// As above for a raw matrix; throws NonUnitaryError if it is not unitary.
PureState evolve(const PureState& state, const ComplexMatrix& u);

/// Single transition amplitude <out| U |in>.
Complex transition_amplitude(const FockState& in, const FockState& out, const ModeUnitary& u);

/// |<pattern|state>|^2. Throws DimensionError if the pattern's mode count or
/// photon number differs from the state's.
double coincidence_probability(const PureState& state, const FockState& pattern);

}  // namespace qpc
