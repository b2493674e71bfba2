#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace roadfuse {

/// Malformed input file. `location()` is a human-readable position
/// ("line 12", "feature 3", "way 4711") and is empty when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::string location = {})
      : std::runtime_error(location.empty() ? message : location + ": " + message),
        location_(std::move(location)) {}

  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

/// Arguments or parameters that violate a documented precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Query against an empty structure (e.g. nearest node of an empty index).
class NotFound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exhaustive routine refused because the input exceeds its size guard.
class SizeGuardError : public std::runtime_error {
 public:
  SizeGuardError(const std::string& what, std::size_t size, std::size_t limit)
      : std::runtime_error(what + " (size " + std::to_string(size) + " exceeds limit " +
                           std::to_string(limit) + ")") {}
};

/// A synthetic world could not be generated from its spec.
class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace roadfuse
