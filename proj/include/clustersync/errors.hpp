#pragma once

#include <stdexcept>
#include <string>

namespace clustersync {

enum class ErrorKind {
  NonFinite,
  ZeroVector,
  InvalidParams,
  NoConvergence,
  BadPermutation,
  DomainError,
  WrongK,
  ParseError,
  ValidationError,
  IoError,
};

const char* to_string(ErrorKind kind);

/// Base exception for every recoverable failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace clustersync
