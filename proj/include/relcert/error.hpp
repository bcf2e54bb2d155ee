#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace relcert {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed group specification or word text. `offset` is a byte offset into
/// the parsed string.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t offset)
      : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Well-formed input that the library refuses (unsupported kind, non-reducing
/// rewriting rule, duplicate symbol, mismatched groups, ...).
class SpecError : public Error {
 public:
  using Error::Error;
};

/// A computation needed a point or element beyond the enumerated window.
/// Callers should deepen the coset space or shrink the window.
class OutOfWindow : public Error {
 public:
  using Error::Error;
};

/// Bounded subgroup membership search could neither confirm nor refute.
class SearchExhausted : public Error {
 public:
  using Error::Error;
};

/// An enumeration or instance exceeded the configured cell cap.
class ResourceLimit : public Error {
 public:
  using Error::Error;
};

/// Malformed persisted artifact (JSON, edge list, config).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// An internal consistency check failed. Always a bug or corrupted input.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace relcert
