#include "lanescan/session.hpp"

#include <fstream>
#include <sstream>

#include "json_fields.hpp"
#include "lanescan/error.hpp"
#include "lanescan/lane.hpp"

namespace fs = std::filesystem;

namespace lanescan {

SessionFile parse_session(const nlohmann::json& j, const fs::path& base_dir) {
  namespace jf = json_fields;
  SessionFile s;
  const fs::path image = jf::string(j, "image", "");
  if (image.empty()) jf::fail("image", "must not be empty");
  s.image = image.is_absolute() ? image : base_dir / image;

  if (j.contains("rotation_degrees")) s.rotation_degrees = jf::number(j, "rotation_degrees", "");
  if (j.contains("baseline")) {
    const std::string b = jf::string(j, "baseline", "");
    if (b != "raw" && b != "linear") jf::fail("baseline", "expected \"raw\" or \"linear\"");
    s.baseline = parse_baseline(b);
  }

  const auto& runs = jf::array(j, "runs", "");
  if (runs.empty()) jf::fail("runs", "at least one run is required");
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const std::string at = jf::index("runs", i);
    const auto& r = runs[i];
    RunSpec run;
    std::tie(run.rect_a, run.rect_b) = jf::point_pair(jf::member(r, "rect_clicks", at), jf::join(at, "rect_clicks"));
    run.seed_click_y = jf::number(r, "seed_click_y", at);
    run.front_click_y = jf::number(r, "front_click_y", at);
    const std::string peaks_at = jf::join(at, "peak_clicks");
    const auto& peaks = jf::array(r, "peak_clicks", at);
    if (peaks.empty()) jf::fail(peaks_at, "at least one peak click pair is required");
    for (std::size_t k = 0; k < peaks.size(); ++k) {
      const auto [a, b] = jf::point_pair(peaks[k], jf::index(peaks_at, k));
      run.peak_clicks.push_back({a, b});
    }
    if (r.contains("comments")) run.comments = jf::string(r, "comments", at);
    s.runs.push_back(std::move(run));
  }
  return s;
}

SessionFile load_session(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::FileUnreadable, "cannot read session file: " + path.string());
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::SchemaViolation, "session file is not valid JSON: " + std::string(e.what()),
                "<root>");
  }
  return parse_session(j, path.parent_path());
}

nlohmann::json to_json(const SessionFile& session) {
  auto pt = [](Point p) { return nlohmann::json::array({p.x, p.y}); };
  nlohmann::json runs = nlohmann::json::array();
  for (const RunSpec& r : session.runs) {
    nlohmann::json peaks = nlohmann::json::array();
    for (const PeakClick& c : r.peak_clicks) peaks.push_back({pt(c.start), pt(c.end)});
    runs.push_back({{"rect_clicks", {pt(r.rect_a), pt(r.rect_b)}},
                    {"seed_click_y", r.seed_click_y},
                    {"front_click_y", r.front_click_y},
                    {"peak_clicks", peaks},
                    {"comments", r.comments}});
  }
  return {{"image", session.image.string()},
          {"rotation_degrees", session.rotation_degrees},
          {"baseline", std::string(to_string(session.baseline))},
          {"runs", runs}};
}

LaneAnalysis analyze_lane(const GrayImage& gray, const RunSpec& run, BaselineMode mode) {
  const LaneRect rect = make_rect(run.rect_a, run.rect_b, gray.width(), gray.height());
  LaneCrop lane = crop(gray, rect);
  lane.marks = make_marks(run.seed_click_y, run.front_click_y, rect.height());
  Chromatogram chrom = compute_profile(lane);
  auto peaks = analyze_run(chrom, run.peak_clicks, mode);
  return {rect, *lane.marks, std::move(chrom), std::move(peaks)};
}

AnalysisResult run_session(const SessionFile& session, const AnalysisOptions& options) {
  const GrayImage gray = rotate(to_grayscale(load_image(session.image)), session.rotation_degrees);
  const BaselineMode mode = options.baseline_override.value_or(session.baseline);

  // Analyze every run before touching the filesystem so a bad run leaves no
  // partial bundle behind.
  std::vector<LaneAnalysis> lanes;
  for (std::size_t i = 0; i < session.runs.size(); ++i) {
    try {
      lanes.push_back(analyze_lane(gray, session.runs[i], mode));
    } catch (const Error& e) {
      throw Error(e.code(), "run " + std::to_string(i + 1) + ": " + e.what(), e.field());
    }
  }

  AnalysisResult result;
  if (options.out_dir) {
    std::error_code ec;
    fs::create_directories(*options.out_dir, ec);
    if (ec || !fs::is_directory(*options.out_dir)) {
      throw Error(ErrorCode::IoError, "cannot create output folder " + options.out_dir->string());
    }
    result.output_dir = *options.out_dir;
  } else {
    result.output_dir = output_dir_for(session.image);
  }

  result.files.push_back(write_grayscale(result.output_dir, gray));
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    const LaneAnalysis& lane = lanes[i];
    RunReport report{session.image.filename().string(),
                     static_cast<int>(i + 1),
                     session.runs[i].comments,
                     mode,
                     lane.marks,
                     lane.rect,
                     lane.peaks};
    const auto plot = write_chromatogram(result.output_dir, report.run_number,
                                         render_chromatogram(lane.chromatogram, lane.peaks, options.style));
    result.files.push_back(plot.png);
    result.files.push_back(plot.svg);
    result.files.push_back(write_report(result.output_dir, report));
    result.reports.push_back(std::move(report));
  }
  return result;
}

std::string summary_table(const std::vector<RunReport>& reports) {
  std::ostringstream out;
  for (const RunReport& r : reports) {
    out << "run " << r.run_number << " (" << r.image_name << ", baseline " << to_string(r.baseline) << ")\n";
    out << "  peak        area   percent     rf\n";
    for (const PeakResult& p : r.peaks) {
      std::string line = "  ";
      auto pad = [&](const std::string& s, std::size_t width) {
        line += std::string(width > s.size() ? width - s.size() : 0, ' ') + s;
      };
      pad(std::to_string(p.number), 4);
      pad(format_fixed(p.area, 4), 12);
      pad(format_fixed(p.percent, 2), 10);
      pad(format_fixed(p.rf, 3), 7);
      out << line << '\n';
    }
  }
  return out.str();
}

}  // namespace lanescan
