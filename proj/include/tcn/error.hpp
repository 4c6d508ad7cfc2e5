#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tcn {

// Every failure surfaced by the library carries one of these kinds. The CLI
// prints the kind's name as a machine-parsable error class.
enum class ErrorKind {
    DimensionMismatch,
    InvalidArgument,
    MissingFile,
    Io,
    Format,
    LabelOutOfRange,
    OverlappingSplits,
    InvariantViolation,
    SolverFailure,
    Divergence,
    StaleTrace,
};

std::string_view error_kind_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace tcn
