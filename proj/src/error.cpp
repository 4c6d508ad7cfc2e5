#include "tcn/error.hpp"

namespace tcn {

std::string_view error_kind_name(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::DimensionMismatch: return "dimension_mismatch";
        case ErrorKind::InvalidArgument: return "invalid_argument";
        case ErrorKind::MissingFile: return "missing_file";
        case ErrorKind::Io: return "io_error";
        case ErrorKind::Format: return "format_error";
        case ErrorKind::LabelOutOfRange: return "label_out_of_range";
        case ErrorKind::OverlappingSplits: return "overlapping_splits";
        case ErrorKind::InvariantViolation: return "invariant_violation";
        case ErrorKind::SolverFailure: return "solver_failure";
        case ErrorKind::Divergence: return "divergence";
        case ErrorKind::StaleTrace: return "stale_trace";
    }
    return "unknown";
}

}  // namespace tcn
