#pragma once

#include <stdexcept>
#include <string>

namespace cbcfd {

/// Two operands live on different grids or at different staggered locations.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A precondition on caller-supplied data was violated.
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Factorization hit a zero pivot or an iterative solve missed its tolerance.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what, long pivot = -1)
      : std::runtime_error(what), pivot_(pivot) {}

  /// Zero-based pivot index, or -1 when the failure is not a pivot failure.
  [[nodiscard]] long pivot() const noexcept { return pivot_; }

 private:
  long pivot_;
};

/// Invalid run configuration; `field()` names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

  [[nodiscard]] const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace cbcfd
