#pragma once

#include <stdexcept>
#include <string>

namespace sams {

/// Base class for every error the toolkit raises. `kind()` is a stable
/// short tag (e.g. "ZeroVector", "FormatError") used by the CLI and the
/// Python bindings to classify failures.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

/// Caller passed arguments that cannot be combined (bad flags, bad config).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Input data could not be read or is malformed.
class DataError : public Error {
 public:
  using Error::Error;
};

inline UsageError dimensionMismatch(const std::string& what) {
  return UsageError("DimensionMismatch", what);
}

}  // namespace sams
