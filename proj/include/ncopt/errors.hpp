#pragma once

#include <stdexcept>
#include <string>

namespace ncopt {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on shapes, ranges or values was violated.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// An EM component received zero total posterior mass.
class DegenerateComponent : public Error {
 public:
  using Error::Error;
};

/// A rejection-sampling generator exhausted its attempt budget.
class GenerationError : public Error {
 public:
  using Error::Error;
};

/// Tensor deflation recovered a component that overlaps an earlier one.
class DeflationFailure : public Error {
 public:
  using Error::Error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidInput(message);
}

}  // namespace ncopt
