#pragma once

#include <stdexcept>
#include <string>

namespace peakreg {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two series (or a series and a window) do not line up.
class AlignmentError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A battery power request exceeds the rating.
class LimitError : public Error {
 public:
  using Error::Error;
};

/// A state-of-charge update would leave [soc_min, soc_max].
class SocViolation : public Error {
 public:
  using Error::Error;
};

/// The simplex method broke down (iteration cap, singular basis).
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Malformed input data or configuration. The message names the offending
/// key path or row number.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An object was queried before it reached the required state.
class StateError : public Error {
 public:
  using Error::Error;
};

}  // namespace peakreg
