#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lanescan/chromatogram.hpp"
#include "lanescan/image.hpp"
#include "lanescan/lane.hpp"
#include "lanescan/peaks.hpp"

namespace lanescan {

struct RunReport {
  std::string image_name;
  int run_number = 1;
  std::string comments;
  BaselineMode baseline = BaselineMode::Raw;
  LaneMarks marks;
  LaneRect rect;
  std::vector<PeakResult> peaks;
};

struct PlotStyle {
  std::string line_color = "#1f4e9c";  // #rrggbb
  std::string x_label = "distance from seed (px)";
  std::string y_label = "intensity";
  double font_size_pt = 11.0;
  int width_px = 900;
  int height_px = 540;
};

/// Sibling folder named after the image stem, created if absent. Existing
/// contents are kept so later runs add to the same bundle.
std::filesystem::path output_dir_for(const std::filesystem::path& image_path);

/// Writes `<dir>/grayscale.png`.
std::filesystem::path write_grayscale(const std::filesystem::path& dir, const GrayImage& gray);

struct RenderedChromatogram {
  RgbImage raster;
  std::string svg;
};

/// Line plot of the signal with seed/front markers, shaded peak spans and
/// each peak's number at its apex. Throws Error(InvalidArgument) for a bad
/// style or peaks that do not fit the chromatogram.
RenderedChromatogram render_chromatogram(const Chromatogram& chrom, std::span<const PeakResult> peaks,
                                         const PlotStyle& style);

struct ChromatogramFiles {
  std::filesystem::path png;
  std::filesystem::path svg;
};

/// Writes `<dir>/chromatogram_run<N>.png` and `.svg`.
ChromatogramFiles write_chromatogram(const std::filesystem::path& dir, int run_number,
                                     const RenderedChromatogram& rendered);

/// Fixed-point text with `decimals` digits, rounding half-up on the shortest
/// decimal representation of `value` (so 2.675 gives "2.68").
std::string format_fixed(double value, int decimals);

/// The results_run<N>.txt contents: four header lines, a tab-separated
/// column header, then one line per peak. LF line endings throughout.
std::string format_report(const RunReport& report);

/// Writes `<dir>/results_run<N>.txt`.
std::filesystem::path write_report(const std::filesystem::path& dir, const RunReport& report);

std::string report_file_name(int run_number);
std::string chromatogram_file_stem(int run_number);

struct ParsedPeakLine {
  int number = 0;
  double area = 0.0;
  double percent = 0.0;
  double rf = 0.0;
  std::string area_text;
  std::string percent_text;
  std::string rf_text;
};

struct ParsedReport {
  std::string image_name;
  int run_number = 0;
  BaselineMode baseline = BaselineMode::Raw;
  std::string comments;  // with "\n" escapes expanded
  std::vector<ParsedPeakLine> peaks;
};

/// Strict reader for the results grammar. Throws Error(SchemaViolation)
/// naming the first line that does not conform.
ParsedReport parse_report(std::string_view text);

}  // namespace lanescan
