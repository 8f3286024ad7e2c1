#pragma once

#include <stdexcept>
#include <string>

namespace lips {

/// Invalid run configuration (bad flags, inconsistent prior spec, ...).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent input data (CSV parse failures, dimension mismatches).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Numeric failure during computation.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// A candidate column is numerically collinear with the current design.
class CollinearityError : public NumericError {
 public:
  explicit CollinearityError(const std::string& what) : NumericError(what) {}
};

}  // namespace lips
