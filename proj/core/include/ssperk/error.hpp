#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ssperk {

enum class ErrorCode {
  invalid_stage_count,
  unsupported_variant,
  parse_error,
  dimension_mismatch,
  invalid_argument,
  invalid_spec,
  order_too_high,
  startup_failure,
  state_invalid,
  io_error,
};

[[nodiscard]] std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for everything the library reports.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Thrown by right-hand sides whose input is outside the physical domain
/// (e.g. negative density). The adaptive integrator treats it as a rejected
/// step instead of aborting the run.
class InvalidState : public Error {
 public:
  explicit InvalidState(const std::string& what) : Error(ErrorCode::state_invalid, what) {}
};

}  // namespace ssperk
