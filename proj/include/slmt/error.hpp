#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace slmt {

enum class ErrorCode {
    rho_not_positive,
    zero_jump_factor,
    degenerate_left_bc,
    unordered_interfaces,
    invalid_potential,
    out_of_domain,
    step_size_underflow,
    non_finite_state,
    non_convergence,
    mismatched_lambda,
    quadrature_not_converged,
    undefined_ratio,
    lost_bracket,
    degenerate_phi,
    suspected_missed_root,
    parse_error,
    invalid_config,
};

inline std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::rho_not_positive: return "RhoNotPositive";
        case ErrorCode::zero_jump_factor: return "ZeroJumpFactor";
        case ErrorCode::degenerate_left_bc: return "DegenerateLeftBC";
        case ErrorCode::unordered_interfaces: return "UnorderedInterfaces";
        case ErrorCode::invalid_potential: return "InvalidPotential";
        case ErrorCode::out_of_domain: return "OutOfDomain";
        case ErrorCode::step_size_underflow: return "StepSizeUnderflow";
        case ErrorCode::non_finite_state: return "NonFiniteState";
        case ErrorCode::non_convergence: return "NonConvergence";
        case ErrorCode::mismatched_lambda: return "MismatchedLambda";
        case ErrorCode::quadrature_not_converged: return "QuadratureNotConverged";
        case ErrorCode::undefined_ratio: return "UndefinedRatio";
        case ErrorCode::lost_bracket: return "LostBracket";
        case ErrorCode::degenerate_phi: return "DegeneratePhi";
        case ErrorCode::suspected_missed_root: return "SuspectedMissedRoot";
        case ErrorCode::parse_error: return "ParseError";
        case ErrorCode::invalid_config: return "InvalidConfig";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace slmt
