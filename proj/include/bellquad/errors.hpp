#pragma once

#include <stdexcept>
#include <string>

namespace bellquad {

// Exit codes used by the command-line front end. Each exception type below
// maps onto exactly one of them.
enum class ExitCode : int {
  success = 0,
  validation = 2,
  chsh_violation = 3,
  inconsistency = 4,
  internal = 5,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept = 0;
};

/// Input that is malformed or outside the domain of a type (non-unit
/// direction, non-Hermitian matrix, probability outside [0,1], ...).
class ValidationError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::validation; }
};

/// Caller passed well-formed values in a combination the operation does not
/// accept, e.g. two observables acting on the same particle.
class UsageError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Probabilities that are individually valid but jointly impossible
/// (a Fréchet bound is violated, or no admissible P(A'B') exists).
class InconsistencyError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::inconsistency; }
};

/// A guaranteed property failed. Seeing one of these means a bug.
class InternalError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::internal; }
};

}  // namespace bellquad
