#include "somite/error.hpp"

namespace somite {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Validation: return "validation error";
    case ErrorKind::Dimension: return "dimension error";
    case ErrorKind::Numeric: return "numeric error";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Divergence: return "divergence error";
    case ErrorKind::Io: return "I/O error";
  }
  return "error";
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Validation:
    case ErrorKind::Dimension: return 2;
    case ErrorKind::Numeric:
    case ErrorKind::Domain:
    case ErrorKind::Divergence: return 3;
    case ErrorKind::Io: return 4;
  }
  return 1;
}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace somite
