#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace splitbox {

enum class ErrorKind {
  invalid_asymmetry,
  invalid_length,
  invalid_protocol,
  out_of_range,
  bracket_failure,
  degenerate_amplitude,
  degenerate_levels,
  dimension_mismatch,
  step_underflow,
  non_real_probability,
  invalid_config,
  all_cells_failed,
  io_failure,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so the CLI can emit a
// machine-readable report.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace splitbox
