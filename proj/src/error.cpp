#include "superframes/error.hpp"

namespace superframes {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::BadMagic: return "BadMagic";
        case ErrorCode::Truncated: return "Truncated";
        case ErrorCode::NonPositiveDims: return "NonPositiveDims";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::IoFailure: return "IoFailure";
        case ErrorCode::BadHeader: return "BadHeader";
        case ErrorCode::UnsupportedMaxval: return "UnsupportedMaxval";
        case ErrorCode::OutOfRange: return "OutOfRange";
        case ErrorCode::NotAnInteger: return "NotAnInteger";
        case ErrorCode::NotANumber: return "NotANumber";
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::NonConsecutiveFrames: return "NonConsecutiveFrames";
        case ErrorCode::NegativeHistogramValue: return "NegativeHistogramValue";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::KTooLarge: return "KTooLarge";
        case ErrorCode::FrameCountMismatch: return "FrameCountMismatch";
        case ErrorCode::MixedDimensions: return "MixedDimensions";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::SpecInvalid: return "SpecInvalid";
    }
    return "Unknown";
}

}  // namespace superframes
