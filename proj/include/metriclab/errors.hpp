#pragma once

#include <stdexcept>
#include <string>

namespace metriclab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration, expression, or usage. Maps to CLI exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A kernel or map failed while being evaluated on concrete points.
/// Maps to CLI exit code 3.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

}  // namespace metriclab
