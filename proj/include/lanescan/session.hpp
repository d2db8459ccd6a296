#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lanescan/chromatogram.hpp"
#include "lanescan/image.hpp"
#include "lanescan/peaks.hpp"
#include "lanescan/report.hpp"

namespace lanescan {

/// The clicks of one lane analysis, in working-image pixel space.
struct RunSpec {
  Point rect_a;
  Point rect_b;
  double seed_click_y = 0.0;
  double front_click_y = 0.0;
  std::vector<PeakClick> peak_clicks;
  std::string comments;
};

/// A recorded interactive session, replayed without prompting.
struct SessionFile {
  std::filesystem::path image;
  double rotation_degrees = 0.0;
  BaselineMode baseline = BaselineMode::Raw;
  std::vector<RunSpec> runs;
};

/// Relative image paths resolve against `base_dir`. Throws
/// Error(SchemaViolation) whose field() is the dotted path of the culprit.
SessionFile parse_session(const nlohmann::json& j, const std::filesystem::path& base_dir);
SessionFile load_session(const std::filesystem::path& path);
nlohmann::json to_json(const SessionFile& session);

/// Everything one lane produces, before anything is written.
struct LaneAnalysis {
  LaneRect rect;
  LaneMarks marks;
  Chromatogram chromatogram;
  std::vector<PeakResult> peaks;
};

/// rect -> crop -> marks -> profile -> peaks on an already rotated image.
LaneAnalysis analyze_lane(const GrayImage& gray, const RunSpec& run, BaselineMode mode);

struct AnalysisOptions {
  std::optional<BaselineMode> baseline_override;
  std::optional<std::filesystem::path> out_dir;
  PlotStyle style;
};

struct AnalysisResult {
  std::filesystem::path output_dir;
  std::vector<RunReport> reports;
  std::vector<std::filesystem::path> files;
};

/// Runs the whole session and writes the bundle. An Error raised while
/// analyzing a run is rethrown with "run <k>: " prefixed to its message.
AnalysisResult run_session(const SessionFile& session, const AnalysisOptions& options);

/// Fixed-width per-run summary for terminal output.
std::string summary_table(const std::vector<RunReport>& reports);

}  // namespace lanescan
