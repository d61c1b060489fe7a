#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace urnedge {

enum class ErrorCode {
    // configuration / input errors (CLI exit 1)
    ConfigError,
    InfeasibleTotal,
    NonpositiveShape,
    OrderTooHigh,
    UnsupportedOrder,
    SupportTooShort,
    OffLattice,
    // numerical errors (CLI exit 2)
    DegenerateStatistic,
    MissingMoments,
    StateBudgetExceeded,
    NonRepresentableValues,
    QuadratureNotConverged,
    MismatchBeyondTolerance,
};

constexpr std::string_view error_name(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::InfeasibleTotal: return "InfeasibleTotal";
    case ErrorCode::NonpositiveShape: return "NonpositiveShape";
    case ErrorCode::OrderTooHigh: return "OrderTooHigh";
    case ErrorCode::UnsupportedOrder: return "UnsupportedOrder";
    case ErrorCode::SupportTooShort: return "SupportTooShort";
    case ErrorCode::OffLattice: return "OffLattice";
    case ErrorCode::DegenerateStatistic: return "DegenerateStatistic";
    case ErrorCode::MissingMoments: return "MissingMoments";
    case ErrorCode::StateBudgetExceeded: return "StateBudgetExceeded";
    case ErrorCode::NonRepresentableValues: return "NonRepresentableValues";
    case ErrorCode::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorCode::MismatchBeyondTolerance: return "MismatchBeyondTolerance";
    }
    return "Unknown";
}

constexpr bool is_numerical(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::DegenerateStatistic:
    case ErrorCode::MissingMoments:
    case ErrorCode::StateBudgetExceeded:
    case ErrorCode::NonRepresentableValues:
    case ErrorCode::QuadratureNotConverged:
    case ErrorCode::MismatchBeyondTolerance:
        return true;
    default:
        return false;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    std::string_view name() const noexcept { return error_name(code_); }

private:
    ErrorCode code_;
};

} // namespace urnedge
