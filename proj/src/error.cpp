#include "lanescan/error.hpp"

namespace lanescan {

std::string_view code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::FileUnreadable: return "file_unreadable";
    case ErrorCode::UnsupportedFormat: return "unsupported_format";
    case ErrorCode::NonFiniteAngle: return "non_finite_angle";
    case ErrorCode::DegenerateSelection: return "degenerate_selection";
    case ErrorCode::RectOutOfBounds: return "rect_out_of_bounds";
    case ErrorCode::CoincidentMarks: return "coincident_marks";
    case ErrorCode::InvalidBounds: return "invalid_bounds";
    case ErrorCode::DegenerateFront: return "degenerate_front";
    case ErrorCode::OverlappingPeaks: return "overlapping_peaks";
    case ErrorCode::EmptyPeakSet: return "empty_peak_set";
    case ErrorCode::ZeroTotalArea: return "zero_total_area";
    case ErrorCode::SpecOutOfBounds: return "spec_out_of_bounds";
    case ErrorCode::SchemaViolation: return "schema_violation";
    case ErrorCode::IoError: return "io_error";
    case ErrorCode::InvalidArgument: return "invalid_argument";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message,
             std::optional<std::string> field)
    : std::runtime_error(message), code_(code), field_(std::move(field)) {}

}  // namespace lanescan
