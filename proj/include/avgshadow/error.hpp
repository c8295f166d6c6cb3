#pragma once

#include <stdexcept>
#include <string>

namespace avgshadow {

enum class ErrorCode {
  space_mismatch,
  unknown_symbol,
  invalid_argument,
  precondition_failed,
  preimage_unavailable,
  budget_exceeded,
  unsupported,
  parse_error,
  io_error,
};

const char* to_string(ErrorCode code) noexcept;

/// Every library failure is an Error carrying a code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace avgshadow
