#pragma once

#include <stdexcept>
#include <string>

namespace pm25 {

// Tensor or layer dimensions that do not line up.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An API called in the wrong order (e.g. backward with no cached forward).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Arguments outside an operation's mathematical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// NaN/Inf produced somewhere it must not be.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or missing input data (manifests, readings, images).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pm25
