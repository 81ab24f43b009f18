#pragma once

#include <stdexcept>
#include <string>

namespace bvsmed {

/// Invalid user configuration or schema. Raised before any sampling starts.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (missing columns, non-finite cells, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure inside an update (singular precision, non-finite moments).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bvsmed
