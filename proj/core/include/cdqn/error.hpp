#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace cdqn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration value (layer sizes, ratios, hyperparameters).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Dimension or architecture mismatch.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Value outside the domain of an operation (action levels, negative settings).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// API misuse, e.g. a forward cache that no longer matches its network.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Dataset content that cannot be processed (empty sets, degenerate statistics).
class DataError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values encountered in numeric code. `layer()` names the
/// offending network layer when the error came from a parameter update.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what, std::optional<std::size_t> layer = std::nullopt)
      : Error(what), layer_(layer) {}

  std::optional<std::size_t> layer() const noexcept { return layer_; }

 private:
  std::optional<std::size_t> layer_;
};

}  // namespace cdqn
