#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace moss {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text. Carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Invalid arguments or configuration (bad node index, zero budget, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A sampler or distribution has no support on this graph (its global weight is zero).
class InapplicableError : public Error {
 public:
  using Error::Error;
};

/// A 64-bit accumulator would overflow.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Exact enumeration refused because the projected work exceeds the cap.
class ScaleCapError : public Error {
 public:
  ScaleCapError(const std::string& what, double projected)
      : Error(what), projected_(projected) {}
  double projected() const noexcept { return projected_; }

 private:
  double projected_;
};

/// Replay tape is too short or does not match the run being replayed.
class TapeError : public Error {
 public:
  using Error::Error;
};

}  // namespace moss
