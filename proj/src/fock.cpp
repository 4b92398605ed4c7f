#include "qpc/fock.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>

namespace qpc {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

double occupation_factorial_product(const FockState& s) {
  double p = 1.0;
  for (int n : s.occupations()) p *= factorial(n);
  return p;
}

// Mode index of each photon, repeated by occupation: |21> -> {0, 0, 1}.
std::vector<std::size_t> photon_modes(const FockState& s) {
  std::vector<std::size_t> modes;
  modes.reserve(static_cast<std::size_t>(s.photon_count()));
  for (std::size_t m = 0; m < s.mode_count(); ++m) {
    for (int k = 0; k < s[m]; ++k) modes.push_back(m);
  }
  return modes;
}

void enumerate_patterns(std::size_t mode, int remaining, std::vector<int>& current,
                        std::vector<FockState>& out) {
  if (mode + 1 == current.size()) {
    current[mode] = remaining;
    out.emplace_back(current);
    return;
  }
  for (int n = remaining; n >= 0; --n) {
    current[mode] = n;
    enumerate_patterns(mode + 1, remaining - n, current, out);
  }
}

}  // namespace

FockState::FockState(std::vector<int> occupations) : occupations_(std::move(occupations)) {
  if (occupations_.empty()) throw DimensionError("FockState needs at least one mode");
  for (int n : occupations_) {
    if (n < 0) throw RangeError("FockState occupations must be non-negative");
    photons_ += n;
  }
}

std::string FockState::ket() const {
  const bool packed = std::all_of(occupations_.begin(), occupations_.end(),
                                  [](int n) { return n < 10; });
  std::ostringstream os;
  os << '|';
  for (std::size_t i = 0; i < occupations_.size(); ++i) {
    if (!packed && i > 0) os << ',';
    os << occupations_[i];
  }
  os << '>';
  return os.str();
}

std::vector<FockState> fock_basis(std::size_t modes, int photons) {
  if (modes == 0) throw DimensionError("fock_basis needs at least one mode");
  if (photons < 0) throw RangeError("photon number must be non-negative");
  std::vector<FockState> out;
  std::vector<int> current(modes, 0);
  enumerate_patterns(0, photons, current, out);
  return out;
}

PureState::PureState(std::size_t mode_count, TermMap terms) : mode_count_(mode_count) {
  if (mode_count_ == 0) throw DimensionError("PureState needs at least one mode");
  bool first = true;
  for (const auto& [ket, amp] : terms) {
    if (ket.mode_count() != mode_count_) {
      throw DimensionError("ket " + ket.ket() + " does not match state mode count " +
                           std::to_string(mode_count_));
    }
    if (first) {
      photons_ = ket.photon_count();
      first = false;
    } else if (ket.photon_count() != photons_) {
      throw DimensionError("kets in a PureState must share one photon number");
    }
    if (std::abs(amp) >= kAmplitudePruneThreshold) terms_.emplace(ket, amp);
  }
}

PureState PureState::basis(const FockState& ket) {
  return PureState(ket.mode_count(), {{ket, Complex{1.0, 0.0}}});
}

Complex PureState::amplitude(const FockState& ket) const {
  auto it = terms_.find(ket);
  return it == terms_.end() ? Complex{} : it->second;
}

double PureState::norm_squared() const {
  double sum = 0.0;
  for (const auto& [ket, amp] : terms_) sum += std::norm(amp);
  return sum;
}

PureState PureState::scaled(Complex factor) const {
  TermMap out;
  for (const auto& [ket, amp] : terms_) out.emplace(ket, amp * factor);
  PureState s(mode_count_, std::move(out));
  s.photons_ = photons_;
  return s;
}

PureState PureState::normalized() const {
  const double n2 = norm_squared();
  if (n2 == 0.0) throw RangeError("cannot normalize the null state");
  return scaled(1.0 / std::sqrt(n2));
}

PureState PureState::with_canonical_phase() const {
  double largest = 0.0;
  for (const auto& [ket, amp] : terms_) largest = std::max(largest, std::abs(amp));
  if (largest == 0.0) return *this;
  // Basis order is lexicographically descending, so walk the map backwards.
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    if (std::abs(it->second) >= largest - 1e-9) {
      return scaled(std::conj(it->second) / std::abs(it->second));
    }
  }
  return *this;
}

PureState operator+(const PureState& a, const PureState& b) {
  if (a.mode_count() != b.mode_count()) throw DimensionError("mode count mismatch in state sum");
  if (!a.terms().empty() && !b.terms().empty() && a.photon_count() != b.photon_count()) {
    throw DimensionError("photon number mismatch in state sum");
  }
  PureState::TermMap out = a.terms();
  for (const auto& [ket, amp] : b.terms()) out[ket] += amp;
  return PureState(a.mode_count(), std::move(out));
}

namespace {

double max_distance_with_phase(const PureState& a, const PureState& b, Complex phase) {
  double worst = 0.0;
  for (const auto& [ket, amp] : a.terms()) {
    worst = std::max(worst, std::abs(amp - phase * b.amplitude(ket)));
  }
  for (const auto& [ket, amp] : b.terms()) {
    worst = std::max(worst, std::abs(a.amplitude(ket) - phase * amp));
  }
  return worst;
}

}  // namespace

double max_amplitude_distance(const PureState& a, const PureState& b) {
  return max_distance_with_phase(a, b, Complex{1.0, 0.0});
}

double max_amplitude_distance_up_to_phase(const PureState& a, const PureState& b) {
  Complex overlap{};
  for (const auto& [ket, amp] : b.terms()) overlap += std::conj(amp) * a.amplitude(ket);
  const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex{1.0, 0.0};
  return max_distance_with_phase(a, b, phase);
}

double unitarity_deviation(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("unitarity check needs a square matrix");
  const ComplexMatrix d = m * m.adjoint() - ComplexMatrix::Identity(m.rows(), m.cols());
  return d.cwiseAbs().maxCoeff();
}

ModeUnitary::ModeUnitary(ComplexMatrix entries, double tolerance) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw DimensionError("mode unitary must be a non-empty square matrix");
  }
  const double dev = unitarity_deviation(entries_);
  if (!(dev <= tolerance)) {
    throw NonUnitaryError("matrix deviates from unitarity by " + std::to_string(dev));
  }
}

ModeUnitary ModeUnitary::identity(std::size_t modes) {
  const auto n = static_cast<Eigen::Index>(modes);
  return ModeUnitary(ComplexMatrix::Identity(n, n));
}

ModeUnitary ModeUnitary::operator*(const ModeUnitary& other) const {
  if (mode_count() != other.mode_count()) throw DimensionError("mode count mismatch in product");
  return ModeUnitary(entries_ * other.entries_);
}

Complex permanent(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) {
    throw DimensionError("permanent needs a square matrix, got " + std::to_string(m.rows()) +
                         "x" + std::to_string(m.cols()));
  }
  const auto n = static_cast<int>(m.rows());
  if (n == 0) return {1.0, 0.0};
  if (n > 30) throw DimensionError("permanent dimension too large");

  // Ryser: perm = (-1)^n sum_S (-1)^|S| prod_i sum_{j in S} m_ij, with the
  // subsets visited in Gray-code order so each step adds or removes one column.
  std::vector<Complex> row_sums(static_cast<std::size_t>(n), Complex{});
  Complex total{};
  std::uint64_t gray = 0;
  const std::uint64_t subsets = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < subsets; ++k) {
    const std::uint64_t next = k ^ (k >> 1);
    const std::uint64_t flipped = next ^ gray;
    const int col = std::countr_zero(flipped);
    const double sign = (next & flipped) ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) row_sums[static_cast<std::size_t>(i)] += sign * m(i, col);
    gray = next;
    Complex prod{1.0, 0.0};
    for (const Complex& s : row_sums) prod *= s;
    const bool odd_subset = (std::popcount(gray) & 1) != 0;
    total += odd_subset ? -prod : prod;
  }
  return (n % 2 == 0) ? total : -total;
}

Complex transition_amplitude(const FockState& in, const FockState& out, const ModeUnitary& u) {
  if (in.mode_count() != u.mode_count() || out.mode_count() != u.mode_count()) {
    throw DimensionError("pattern mode count does not match the unitary");
  }
  if (in.photon_count() != out.photon_count()) return {};
  const auto rows = photon_modes(out);
  const auto cols = photon_modes(in);
  const auto n = static_cast<Eigen::Index>(rows.size());
  ComplexMatrix sub(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      sub(r, c) = u(rows[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)]);
    }
  }
  return permanent(sub) /
         std::sqrt(occupation_factorial_product(in) * occupation_factorial_product(out));
}

PureState evolve(const PureState& state, const ModeUnitary& u) {
  if (state.mode_count() != u.mode_count()) {
    throw DimensionError("state has " + std::to_string(state.mode_count()) +
                         " modes but unitary acts on " + std::to_string(u.mode_count()));
  }
  const auto outputs = fock_basis(state.mode_count(), state.photon_count());
  PureState::TermMap result;
  for (const auto& out : outputs) {
    Complex amp{};
    for (const auto& [in, a] : state.terms()) amp += a * transition_amplitude(in, out, u);
    result.emplace(out, amp);
  }
  return PureState(state.mode_count(), std::move(result));
}

PureState evolve(const PureState& state, const ComplexMatrix& u) {
  return evolve(state, ModeUnitary(u));
}

double coincidence_probability(const PureState& state, const FockState& pattern) {
  if (pattern.mode_count() != state.mode_count()) {
    throw DimensionError("pattern " + pattern.ket() + " has the wrong mode count");
  }
  if (pattern.photon_count() != state.photon_count()) {
    throw DimensionError("pattern " + pattern.ket() + " has the wrong photon number");
  }
  return std::norm(state.amplitude(pattern));
}

}  // namespace qpc
