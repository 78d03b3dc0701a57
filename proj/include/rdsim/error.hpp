#pragma once

#include <stdexcept>
#include <string>

namespace rdsim {

/// Broad failure category. Maps one-to-one onto CLI exit codes and C API status codes.
enum class ErrorCategory {
    Usage,      // bad arguments or contract violation by the caller
    Data,       // input files or scene data are invalid
    Numerical,  // simulation produced non-finite values
    Io,         // file could not be opened or written
};

enum class ErrorCode {
    InvalidArgument,
    MissingColumn,
    MalformedRow,
    InconsistentMeta,
    EmptyRecording,
    FrameOutOfRange,
    ProjectionDegenerate,
    InvalidScene,
    InvalidCount,
    EmptyTable,
    NumericalFailure,
    IoFailure,
};

const char* to_string(ErrorCode code) noexcept;
ErrorCategory category_of(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }
    ErrorCategory category() const noexcept { return category_of(code_); }

private:
    ErrorCode code_;
};

}  // namespace rdsim
