#pragma once

#include <stdexcept>
#include <string>

namespace chns {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// A point lies outside the meshed domain.
class OutsideDomain : public Error {
public:
  using Error::Error;
};

/// Linear solve failed: singular pivot or residual contract violated.
class SolveError : public Error {
public:
  using Error::Error;
};

/// Newton or Picard iteration did not converge within its cap.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, double last_increment)
      : Error(what), last_increment_(last_increment) {}

  double last_increment() const noexcept { return last_increment_; }

private:
  double last_increment_;
};

/// Malformed or invalid configuration text.
class ConfigError : public Error {
public:
  ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

  int line() const noexcept { return line_; }

private:
  int line_;
};

}  // namespace chns
