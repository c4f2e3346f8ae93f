#pragma once

#include <stdexcept>
#include <string>

namespace sofp {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad caller input: dimensions, non-Hermitian blocks, malformed descriptors.
struct InvalidInputError : Error {
  using Error::Error;
};

// Evaluation requested outside a function's domain of validity.
struct DomainError : Error {
  using Error::Error;
};

// Closed-form G2 evaluated too close to its removable diagonal z = w.
struct NearDiagonalError : DomainError {
  using DomainError::DomainError;
};

// Resolvent trace evaluated too close to an eigenvalue.
struct NearPoleError : DomainError {
  using DomainError::DomainError;
};

// Combinatorial enumeration beyond the configured cap.
struct CapacityError : Error {
  using Error::Error;
};

// A numerical method failed to converge.
struct NumericError : Error {
  using Error::Error;
};

// Inconsistent run configuration (intersecting contours, bad targets, ...).
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace sofp
