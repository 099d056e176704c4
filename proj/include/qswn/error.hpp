#pragma once

#include <stdexcept>
#include <string>

namespace qswn {

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// More shortcuts requested than the graph can hold.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Mismatched vector or matrix sizes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid scenario or sweep configuration. `field` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Eigensolver failure or other floating-point breakdown.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Least-squares system is rank deficient.
class ConditioningError : public Error {
 public:
  using Error::Error;
};

}  // namespace qswn
