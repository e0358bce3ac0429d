#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace volvar {

enum class ErrorCode {
    MalformedRow,
    NonPositivePrice,
    OutOfOrderTimestamp,
    TooFewBars,
    EmptyDay,
    TooFewObservations,
    ZeroVariance,
    DimensionMismatch,
    NonFiniteValue,
    Divergence,
    SingularDesign,
    WindowTooShort,
    InvalidParameter,
    NoFiniteLikelihood,
    InsufficientExceedances,
    NonConvergence,
    OutsideSupport,
    QuantileNotInTail,
    NonPositiveVariance,
    DateMisalignment,
    DegenerateSeries,
    InvalidSplit,
    InvalidConfig,
    MissingArtifact,
    Io,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a code so callers (and the CLI
// exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

    ErrorCode code() const noexcept { return code_; }
    // The message without the code prefix, for re-throwing with added context.
    const std::string& message() const noexcept { return message_; }

private:
    ErrorCode code_;
    std::string message_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace volvar
