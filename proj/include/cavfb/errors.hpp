#pragma once

#include <stdexcept>
#include <string>

namespace cavfb {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied argument violates an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// The truncated Fock basis cannot represent the requested state or map.
class TruncationError : public Error {
 public:
  using Error::Error;
};

class DegenerateCatError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class IndexError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class DimMismatchError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class DegenerateError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class UnboundedError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Raised when a computed state fails a structural invariant
/// (Hermiticity, trace, positivity).
class InvariantError : public Error {
 public:
  using Error::Error;
};

class GridTooCoarseError : public Error {
 public:
  using Error::Error;
};

class NonUniqueFixedPointError : public Error {
 public:
  using Error::Error;
};

class StepTooCoarseError : public Error {
 public:
  using Error::Error;
};

}  // namespace cavfb
