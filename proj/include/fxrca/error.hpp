#pragma once

#include <stdexcept>
#include <string>

namespace fxrca {

// Argument outside the mathematical domain of a model formula.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Bad configuration value or key. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input file failed schema or content validation. Exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Numerical or identification failure inside an estimator. Exit code 3.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CollinearityError : public EstimationError {
 public:
  CollinearityError(const std::string& column, const std::string& detail)
      : EstimationError(detail), column_(column) {}

  const std::string& column() const { return column_; }

 private:
  std::string column_;
};

class IdentificationError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

}  // namespace fxrca
