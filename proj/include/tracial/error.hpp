#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tracial {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed text or file content. `position` is a character offset when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at position " + std::to_string(position) + ")"), position_(position) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_ = 0;
};

/// Structurally invalid input: wrong sizes, bad weights, incomplete or non-tracial data.
class InputError : public Error {
 public:
  using Error::Error;
};

/// A mathematical precondition does not hold (non-PSD, non-flat, degree overflow).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A numerical routine failed to converge or produced inconsistent output.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace tracial
