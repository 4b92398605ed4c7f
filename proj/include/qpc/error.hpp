#pragma once

#include <stdexcept>
#include <string>

namespace qpc {

/// Matrix or state shapes that do not fit together.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonUnitaryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A parameter outside its physical domain (coupling ratio > 1, negative loss...).
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Operation requires state that has not been established yet, such as an
/// electrode gap that has not been calibrated.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A fit result was used as if it had converged.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qpc
