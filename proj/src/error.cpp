#include "rdsim/error.hpp"

namespace rdsim {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::InconsistentMeta: return "InconsistentMeta";
        case ErrorCode::EmptyRecording: return "EmptyRecording";
        case ErrorCode::FrameOutOfRange: return "FrameOutOfRange";
        case ErrorCode::ProjectionDegenerate: return "ProjectionDegenerate";
        case ErrorCode::InvalidScene: return "InvalidScene";
        case ErrorCode::InvalidCount: return "InvalidCount";
        case ErrorCode::EmptyTable: return "EmptyTable";
        case ErrorCode::NumericalFailure: return "NumericalFailure";
        case ErrorCode::IoFailure: return "IoFailure";
    }
    return "Unknown";
}

ErrorCategory category_of(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument:
        case ErrorCode::InvalidCount:
            return ErrorCategory::Usage;
        case ErrorCode::NumericalFailure:
            return ErrorCategory::Numerical;
        case ErrorCode::IoFailure:
            return ErrorCategory::Io;
        default:
            return ErrorCategory::Data;
    }
}

}  // namespace rdsim
