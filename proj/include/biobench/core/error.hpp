#pragma once

#include <stdexcept>
#include <string>

namespace biobench {

// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or arguments (CLI exit code 1).
class ConfigError : public Error {
public:
  using Error::Error;
};

// Malformed or inconsistent input data.
class DataError : public Error {
public:
  using Error::Error;
};

// Numerical failure during a fit (NaN loss, degenerate problem).
class FitError : public Error {
public:
  using Error::Error;
};

// Raised when a cooperative deadline expires mid-computation.
class Cancelled : public Error {
public:
  Cancelled() : Error("wall-clock budget exhausted") {}
};

} // namespace biobench
