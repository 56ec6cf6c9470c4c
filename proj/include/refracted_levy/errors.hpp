#pragma once

#include <stdexcept>
#include <string>

namespace refracted_levy {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad model parameters, schema violations in spec files.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A valid model queried outside the domain of an identity.
class DomainError : public Error {
 public:
  using Error::Error;
};

class PoleProximityError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// q = 0 together with a zero mean gives a double root at the origin.
class DegenerateRootError : public DomainError {
 public:
  using DomainError::DomainError;
};

class RefractionTooLargeError : public InputError {
 public:
  using InputError::InputError;
};

class NetProfitError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Violation of a <= x, b <= c style level ordering.
class OrderingError : public DomainError {
 public:
  using DomainError::DomainError;
};

class QuadratureError : public DomainError {
 public:
  using DomainError::DomainError;
};

class UnsupportedModelError : public DomainError {
 public:
  using DomainError::DomainError;
};

}  // namespace refracted_levy
