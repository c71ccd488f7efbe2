#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace omegabias {

// Precondition on a mathematical argument violated (bad modulus, imprimitive
// character where a primitive one is required, mismatched grids, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Invalid run configuration (unknown key, malformed value, violated
// precondition detected before any work starts).
class ConfigError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Evaluation requested at a pole (s = 1 for the principal character).
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Malformed, truncated or version-incompatible file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Accumulator would leave its representable range.
class OverflowError : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

// A numerical self-check failed (zero counting, degenerate model, ...).
class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The zero scan could not reconcile its count with the smooth counting
// function; carries the unit windows [k, k+1) that looked under-populated.
class MissedZerosError : public VerificationError {
 public:
  MissedZerosError(const std::string& what, std::vector<double> windows)
      : VerificationError(what), suspect_windows(std::move(windows)) {}
  std::vector<double> suspect_windows;
};

}  // namespace omegabias
