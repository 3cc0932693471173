#pragma once

#include <stdexcept>
#include <string>

namespace nstab {

// Every failure raised by the library derives from Error so callers (the CLI
// in particular) can map them onto exit codes in one place.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of the operation (negative entropy
// input, non-indicator passed where an indicator is required, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Reducible chain, multiple zero eigenvalues.
class DegenerateModel : public Error {
 public:
  using Error::Error;
};

class UndefinedRatio : public Error {
 public:
  using Error::Error;
};

// Bisection or quadrature failed to converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

class SizeLimit : public Error {
 public:
  using Error::Error;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

}  // namespace nstab
