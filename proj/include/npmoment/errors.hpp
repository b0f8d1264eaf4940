#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace npmoment {

// Base for everything this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Caller violated a documented precondition (bad s/k/n, alpha out of range, ...).
struct PreconditionError : Error {
  using Error::Error;
};

// File could not be parsed; message names the offending line.
struct ParseError : Error {
  using Error::Error;
};

// Column roles / row layout inconsistent with the declared schema.
struct SchemaError : Error {
  using Error::Error;
};

struct DimensionError : Error {
  using Error::Error;
};

// Weighted Jacobian (or normal-equation matrix) numerically singular.
struct SingularityError : Error {
  using Error::Error;
};

// Newton failed to reach tolerance; carries the last iterate.
struct ConvergenceError : Error {
  ConvergenceError(const std::string& what, std::vector<double> iterate)
      : Error(what), last_iterate(std::move(iterate)) {}
  std::vector<double> last_iterate;
};

// Inference requested for a moment that needs extra user input (e.g. a density value).
struct UnsupportedInferenceError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace npmoment
