#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bdl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that violates a domain rule (bad identifier, bad sensor spec, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed batch CSV. `line()` is 1-based; 0 when the problem is not tied
/// to a single line.
class CodecError : public Error {
 public:
  CodecError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line), reason_(what) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

class StorageError : public Error {
 public:
  using Error::Error;
};

class TransportError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Lookup of a node, sensor or resource that does not exist.
class NotFoundError : public Error {
 public:
  using Error::Error;
};

}  // namespace bdl
