#pragma once

#include <stdexcept>
#include <string>

namespace chk {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the arguments of an operation is violated.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Gamma-function pole (non-positive integer argument).
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Evaluation at a point where rho, psi or the kernel are singular.
class SingularityError : public DomainError {
 public:
  using DomainError::DomainError;
};

class DegreeError : public DomainError {
 public:
  using DomainError::DomainError;
};

class TailMassError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A series or iterative procedure did not reach its tolerance.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class EigFailure : public Error {
 public:
  using Error::Error;
};

}  // namespace chk
