#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace superframes {

enum class ErrorCode {
    BadMagic,
    Truncated,
    NonPositiveDims,
    InvalidArgument,
    IoFailure,
    BadHeader,
    UnsupportedMaxval,
    OutOfRange,
    NotAnInteger,
    NotANumber,
    MissingColumn,
    NonConsecutiveFrames,
    NegativeHistogramValue,
    IndexOutOfRange,
    KTooLarge,
    FrameCountMismatch,
    MixedDimensions,
    DimensionMismatch,
    SpecInvalid,
};

std::string_view to_string(ErrorCode code);

// Every recoverable failure in the library is reported through this type so
// callers can branch on the code instead of parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace superframes
