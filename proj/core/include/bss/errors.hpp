#pragma once

#include <stdexcept>
#include <string>

namespace bss {

// Base class for all pipeline errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration (unknown option, invalid range, infeasible layout). Exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Bad input data (malformed file, missing column, referential failure). Exit code 3.
class DataError : public Error {
 public:
  using Error::Error;
};

// A documented internal invariant failed to hold. Exit code 4.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace bss
