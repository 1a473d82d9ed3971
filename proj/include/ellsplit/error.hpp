#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ellsplit {

enum class ErrorCode {
    RankDeficient,
    NotSurjective,
    NoCaseApplies,
    DimensionMismatch,
    PointNotOnCurve,
    SingularCurve,
    UnsupportedCMAction,
    UnsupportedCurve,
    PrecisionUnreachable,
    BudgetExceeded,
    UnsupportedMap,
    InvalidVariety,
    TorsionBase,
    NoBasePointFound,
    FiberSolveUnsupported,
    Overflow,
    ParseError,
    ConfigError,
    IOError,
    VerificationFailed,
};

inline std::string_view to_string(ErrorCode c)
{
    switch (c) {
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::NotSurjective: return "NotSurjective";
    case ErrorCode::NoCaseApplies: return "NoCaseApplies";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::PointNotOnCurve: return "PointNotOnCurve";
    case ErrorCode::SingularCurve: return "SingularCurve";
    case ErrorCode::UnsupportedCMAction: return "UnsupportedCMAction";
    case ErrorCode::UnsupportedCurve: return "UnsupportedCurve";
    case ErrorCode::PrecisionUnreachable: return "PrecisionUnreachable";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::UnsupportedMap: return "UnsupportedMap";
    case ErrorCode::InvalidVariety: return "InvalidVariety";
    case ErrorCode::TorsionBase: return "TorsionBase";
    case ErrorCode::NoBasePointFound: return "NoBasePointFound";
    case ErrorCode::FiberSolveUnsupported: return "FiberSolveUnsupported";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IOError: return "IOError";
    case ErrorCode::VerificationFailed: return "VerificationFailed";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what)
{
    throw Error(code, what);
}

} // namespace ellsplit
