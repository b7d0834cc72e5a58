#include "critwave/error.hpp"

namespace critwave {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::step_size_underflow: return "StepSizeUnderflow";
    case ErrorCode::non_finite_state: return "NonFiniteState";
    case ErrorCode::no_sign_change: return "NoSignChange";
    case ErrorCode::max_iterations: return "MaxIterations";
    case ErrorCode::domain_error: return "DomainError";
    case ErrorCode::wronskian_drift: return "WronskianDrift";
    case ErrorCode::orthogonality_failure: return "OrthogonalityFailure";
    case ErrorCode::grid_too_short: return "GridTooShort";
    case ErrorCode::decay_not_entered: return "DecayNotEntered";
    case ErrorCode::singular_bessel_system: return "SingularBesselSystem";
    case ErrorCode::tail_mismatch: return "TailMismatch";
    case ErrorCode::tail_fit_unstable: return "TailFitUnstable";
    case ErrorCode::non_monotone_b: return "NonMonotoneB";
    case ErrorCode::no_dichotomy: return "NoDichotomy";
    case ErrorCode::cfl_violation: return "CFLViolation";
    case ErrorCode::newton_diverged: return "NewtonDiverged";
  }
  return "Unknown";
}

NumericalError::NumericalError(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void raise(ErrorCode code, const std::string& detail) { throw NumericalError(code, detail); }

}  // namespace critwave
