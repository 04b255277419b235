#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace overwatch {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed task specification text. `offset` is the byte offset of the
/// offending token.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Input violates a structural invariant (bad MDP row, unknown letter, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// No accepting state is reachable for a team.
class UnsatisfiableError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace overwatch
