#pragma once

#include <stdexcept>
#include <string>

namespace somite {

/// Failure categories. Each maps to exactly one CLI exit code (see exit_code()).
enum class ErrorKind {
  Validation,  ///< bad configuration, arguments or parameters
  Dimension,   ///< field length does not match the grid
  Numeric,     ///< non-finite input state
  Domain,      ///< parameter/state combination outside a model's domain
  Divergence,  ///< integration blew up
  Io,          ///< file could not be read or written
};

const char* to_string(ErrorKind kind) noexcept;

/// Process exit code for a failure of the given kind: 2 for validation and
/// dimension errors, 3 for numeric/domain/divergence, 4 for I/O.
int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace somite
