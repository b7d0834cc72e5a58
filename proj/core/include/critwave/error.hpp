#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace critwave {

enum class ErrorCode {
  step_size_underflow,
  non_finite_state,
  no_sign_change,
  max_iterations,
  domain_error,
  wronskian_drift,
  orthogonality_failure,
  grid_too_short,
  decay_not_entered,
  singular_bessel_system,
  tail_mismatch,
  tail_fit_unstable,
  non_monotone_b,
  no_dichotomy,
  cfl_violation,
  newton_diverged,
};

std::string_view to_string(ErrorCode code);

// Every numerical failure raised by the library carries one of the codes
// above; callers (the CLI in particular) map it to an exit status.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& detail);

}  // namespace critwave
