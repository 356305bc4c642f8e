#pragma once

#include <stdexcept>
#include <string>

namespace conelab {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Input that violates a documented precondition (bad degree, bad weights, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input document. Carries an optional location
/// string ("file:line" or a JSON pointer).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string location = {})
      : Error(location.empty() ? what : location + ": " + what), location_(std::move(location)) {}
  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

}  // namespace conelab
