#pragma once

#include <stdexcept>
#include <string>

namespace apbda {

/// Base for all recoverable errors raised by the routing library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A divisor metric is non-positive (capability, model sophistication) or
/// non-finite.
class InvalidMetric : public Error {
 public:
  using Error::Error;
};

class UnknownNode : public Error {
 public:
  using Error::Error;
};

/// Predecessor walk did not reach the source.
class BrokenChain : public Error {
 public:
  using Error::Error;
};

class InvalidK : public Error {
 public:
  using Error::Error;
};

/// Exhaustive search refused because the graph exceeds the node guard.
class TooLarge : public Error {
 public:
  using Error::Error;
};

class InvalidParams : public Error {
 public:
  using Error::Error;
};

/// Raised when a reward/state is requested for a window with no tasks.
class EmptyWindow : public Error {
 public:
  using Error::Error;
};

/// Scenario parse or validation failure. `line` is 1-based, 0 when unknown.
class ScenarioError : public Error {
 public:
  ScenarioError(int line, const std::string& message)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace apbda
