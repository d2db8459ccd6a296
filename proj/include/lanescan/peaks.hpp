#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "lanescan/chromatogram.hpp"

namespace lanescan {

/// Closed index interval [start_idx, end_idx] on a chromatogram.
struct PeakBounds {
  std::size_t start_idx = 0;
  std::size_t end_idx = 0;

  friend bool operator==(const PeakBounds&, const PeakBounds&) = default;
};

enum class BaselineMode {
  Raw,          // area under the curve as sampled
  LinearChord,  // subtract the chord joining the two endpoints first
};

/// "raw" or "linear".
std::string_view to_string(BaselineMode mode) noexcept;
/// Throws Error(InvalidArgument) on anything but "raw" or "linear".
BaselineMode parse_baseline(std::string_view text);

struct SnappedPoint {
  std::size_t idx = 0;
  double value = 0.0;
};

/// Start and end clicks delimiting one peak, in chromatogram data space.
struct PeakClick {
  Point start;
  Point end;
};

struct PeakResult {
  int number = 0;  // 1-based, in selection order
  PeakBounds bounds;
  double area = 0.0;
  double percent = 0.0;
  std::size_t apex_idx = 0;
  double rf = 0.0;
};

/// Places a click on the curve. Only the x coordinate matters.
SnappedPoint snap_click(const Chromatogram& chrom, double click_x, double click_y);

/// Trapezoid-rule area over unit-spaced samples. Throws Error(InvalidBounds).
double integrate_peak(const Chromatogram& chrom, PeakBounds bounds, BaselineMode mode);

/// Index of the largest sample in bounds; ties go to the index nearest the seed.
std::size_t find_apex(const Chromatogram& chrom, PeakBounds bounds);

/// Retention factor of the apex, clamped to [0, 1]. Throws Error(DegenerateFront).
double compute_rf(std::size_t apex_idx, std::size_t seed_idx, std::size_t front_idx);

/// Snaps each click pair, integrates and normalizes areas to percentages.
///
/// Throws Error(EmptyPeakSet), Error(InvalidBounds) when both clicks of a
/// pair snap to the same sample, Error(OverlappingPeaks) when two intervals
/// share more than an endpoint, and Error(ZeroTotalArea).
std::vector<PeakResult> analyze_run(const Chromatogram& chrom, std::span<const PeakClick> clicks,
                                    BaselineMode mode);

}  // namespace lanescan
