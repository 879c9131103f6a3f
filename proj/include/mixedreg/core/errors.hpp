#pragma once

#include <stdexcept>
#include <string>

namespace mixedreg {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the caller's input does not hold (bad geometry,
/// exponent out of range, malformed file, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed: singular factorization, non-convergent
/// iteration, divergence of a fixed-point scheme.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidInput(message);
}

}  // namespace mixedreg
