#include "clustersync/errors.hpp"

namespace clustersync {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::BadPermutation: return "BadPermutation";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::WrongK: return "WrongK";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace clustersync
