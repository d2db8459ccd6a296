#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lanescan {

enum class ErrorCode {
  FileUnreadable,
  UnsupportedFormat,
  NonFiniteAngle,
  DegenerateSelection,
  RectOutOfBounds,
  CoincidentMarks,
  InvalidBounds,
  DegenerateFront,
  OverlappingPeaks,
  EmptyPeakSet,
  ZeroTotalArea,
  SpecOutOfBounds,
  SchemaViolation,
  IoError,
  InvalidArgument,
};

// Machine-readable snake_case name, e.g. "degenerate_selection".
std::string_view code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::string> field = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  const std::optional<std::string>& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::optional<std::string> field_;
};

}  // namespace lanescan
