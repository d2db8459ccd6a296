#include "lanescan/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include <opencv2/core.hpp>
#include <opencv2/imgproc.hpp>

#include "lanescan/error.hpp"

namespace fs = std::filesystem;

namespace lanescan {

fs::path output_dir_for(const fs::path& image_path) {
  if (!image_path.has_filename() || image_path.stem().empty()) {
    throw Error(ErrorCode::InvalidArgument, "image path has no file name: " + image_path.string());
  }
  const fs::path parent = image_path.has_parent_path() ? image_path.parent_path() : fs::path(".");
  const fs::path dir = parent / image_path.stem();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::IoError, "cannot create output folder " + dir.string() +
                                        (ec ? ": " + ec.message() : std::string()));
  }
  return dir;
}

fs::path write_grayscale(const fs::path& dir, const GrayImage& gray) {
  const fs::path path = dir / "grayscale.png";
  write_file(path, encode_png(gray));
  return path;
}

std::string report_file_name(int run_number) {
  return "results_run" + std::to_string(run_number) + ".txt";
}

std::string chromatogram_file_stem(int run_number) {
  return "chromatogram_run" + std::to_string(run_number);
}

std::string format_fixed(double value, int decimals) {
  if (!std::isfinite(value) || decimals < 0) {
    throw Error(ErrorCode::InvalidArgument, "cannot format a non-finite value");
  }
  std::array<char, 512> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), std::abs(value),
                                 std::chars_format::fixed);
  const std::string shortest(buf.data(), res.ptr);

  const auto dot = shortest.find('.');
  std::string int_part = shortest.substr(0, dot);
  std::string frac = dot == std::string::npos ? std::string() : shortest.substr(dot + 1);
  frac.resize(static_cast<std::size_t>(decimals) + 1, '0');

  const bool round_up = frac[static_cast<std::size_t>(decimals)] >= '5';
  std::string digits = int_part + frac.substr(0, static_cast<std::size_t>(decimals));
  if (round_up) {
    auto i = digits.size();
    while (i > 0) {
      --i;
      if (digits[i] == '9') {
        digits[i] = '0';
      } else {
        ++digits[i];
        break;
      }
      if (i == 0) digits.insert(digits.begin(), '1');
    }
  }
  const std::size_t int_len = digits.size() - static_cast<std::size_t>(decimals);
  std::string out = digits.substr(0, int_len);
  if (decimals > 0) out += "." + digits.substr(int_len);

  const bool is_zero = std::all_of(out.begin(), out.end(), [](char c) { return c == '0' || c == '.'; });
  if (value < 0 && !is_zero) out.insert(out.begin(), '-');
  return out;
}

namespace {

std::string escape_comments(const std::string& comments) {
  std::string out;
  out.reserve(comments.size());
  for (std::size_t i = 0; i < comments.size(); ++i) {
    const char c = comments[i];
    if (c == '\r') {
      if (i + 1 < comments.size() && comments[i + 1] == '\n') ++i;
      out += "\\n";
    } else if (c == '\n') {
      out += "\\n";
    } else {
      out += c;
    }
  }
  return out;
}

std::string unescape_comments(std::string_view text) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\\' && i + 1 < text.size() && text[i + 1] == 'n') {
      out += '\n';
      ++i;
    } else {
      out += text[i];
    }
  }
  return out;
}

}  // namespace

std::string format_report(const RunReport& report) {
  std::string out;
  out += "image: " + report.image_name + "\n";
  out += "run: " + std::to_string(report.run_number) + "\n";
  out += "baseline: " + std::string(to_string(report.baseline)) + "\n";
  out += "comments: " + escape_comments(report.comments) + "\n";
  out += "peak\tarea\tpercent\trf\n";
  for (const PeakResult& p : report.peaks) {
    out += std::to_string(p.number) + "\t" + format_fixed(p.area, 4) + "\t" +
           format_fixed(p.percent, 2) + "\t" + format_fixed(p.rf, 3) + "\n";
  }
  return out;
}

fs::path write_report(const fs::path& dir, const RunReport& report) {
  const fs::path path = dir / report_file_name(report.run_number);
  const std::string text = format_report(report);
  write_file(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  return path;
}

ParsedReport parse_report(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) {
      throw Error(ErrorCode::SchemaViolation, "report must end with a newline", "line " + std::to_string(lines.size() + 1));
    }
    lines.emplace_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  auto fail = [](std::size_t line_no, const std::string& what) {
    const std::string where = "line " + std::to_string(line_no);
    throw Error(ErrorCode::SchemaViolation, where + ": " + what, where);
  };
  if (lines.size() < 5) fail(lines.size() + 1, "report is truncated");
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].find('\r') != std::string::npos) fail(i + 1, "carriage return in report");
  }

  auto after_prefix = [&](std::size_t i, std::string_view prefix) {
    if (lines[i].rfind(prefix, 0) != 0) fail(i + 1, "expected \"" + std::string(prefix) + "\"");
    return lines[i].substr(prefix.size());
  };

  ParsedReport out;
  out.image_name = after_prefix(0, "image: ");
  const std::string run = after_prefix(1, "run: ");
  static const std::regex kRun(R"([1-9][0-9]*)");
  if (!std::regex_match(run, kRun)) fail(2, "run number must be a positive integer");
  out.run_number = std::stoi(run);
  const std::string baseline = after_prefix(2, "baseline: ");
  if (baseline == "raw") {
    out.baseline = BaselineMode::Raw;
  } else if (baseline == "linear") {
    out.baseline = BaselineMode::LinearChord;
  } else {
    fail(3, "baseline must be raw or linear");
  }
  out.comments = unescape_comments(after_prefix(3, "comments: "));
  if (lines[4] != "peak\tarea\tpercent\trf") fail(5, "expected the peak column header");

  static const std::regex kPeak(R"(([1-9][0-9]*)\t(-?[0-9]+\.[0-9]{4})\t(-?[0-9]+\.[0-9]{2})\t(-?[0-9]+\.[0-9]{3}))");
  for (std::size_t i = 5; i < lines.size(); ++i) {
    std::smatch m;
    if (!std::regex_match(lines[i], m, kPeak)) fail(i + 1, "malformed peak line");
    ParsedPeakLine p;
    p.number = std::stoi(m[1]);
    p.area_text = m[2];
    p.percent_text = m[3];
    p.rf_text = m[4];
    p.area = std::stod(p.area_text);
    p.percent = std::stod(p.percent_text);
    p.rf = std::stod(p.rf_text);
    if (p.number != static_cast<int>(i - 4)) fail(i + 1, "peak numbers must run 1..n");
    out.peaks.push_back(std::move(p));
  }
  return out;
}

// --- chromatogram rendering ---------------------------------------------

namespace {

struct Color {
  std::uint8_t r, g, b;
};

Color parse_color(const std::string& hex) {
  static const std::regex kHex("#[0-9a-fA-F]{6}");
  if (!std::regex_match(hex, kHex)) {
    throw Error(ErrorCode::InvalidArgument, "line color must be #rrggbb, got \"" + hex + "\"");
  }
  auto byte = [&](std::size_t at) {
    return static_cast<std::uint8_t>(std::stoi(hex.substr(at, 2), nullptr, 16));
  };
  return {byte(1), byte(3), byte(5)};
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) { return format_fixed(v, 2); }

// Maps data coordinates onto the plot rectangle.
struct Frame {
  double left, top, right, bottom;
  double x_max, y_max;

  double px(double idx) const { return left + (right - left) * (x_max > 0 ? idx / x_max : 0.0); }
  double py(double value) const { return bottom - (bottom - top) * (value / y_max); }
};

double nice_step(double range, int target_ticks) {
  const double raw = range / std::max(1, target_ticks);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

std::vector<double> ticks(double max, int target) {
  std::vector<double> out;
  const double step = nice_step(max, target);
  for (double t = 0.0; t <= max + 1e-9; t += step) out.push_back(t);
  return out;
}

std::string tick_label(double t) {
  const double r = std::round(t);
  return std::abs(t - r) < 1e-9 ? std::to_string(static_cast<long long>(r)) : format_fixed(t, 1);
}

cv::Scalar bgr(Color c) { return cv::Scalar(c.b, c.g, c.r); }

void dashed_vline(cv::Mat& img, int x, int y0, int y1, const cv::Scalar& color) {
  for (int y = y0; y < y1; y += 10) {
    cv::line(img, {x, y}, {x, std::min(y + 6, y1)}, color, 1, cv::LINE_AA);
  }
}

}  // namespace

RenderedChromatogram render_chromatogram(const Chromatogram& chrom, std::span<const PeakResult> peaks,
                                         const PlotStyle& style) {
  if (style.width_px < 200 || style.height_px < 150 || !(style.font_size_pt > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "plot needs at least 200x150 pixels and a positive font size");
  }
  const Color line = parse_color(style.line_color);
  for (const PeakResult& p : peaks) {
    if (p.bounds.end_idx >= chrom.size() || p.apex_idx >= chrom.size()) {
      throw Error(ErrorCode::InvalidArgument, "peak lies outside the chromatogram");
    }
  }

  const double font_px = style.font_size_pt * 96.0 / 72.0;
  const double w = style.width_px;
  const double h = style.height_px;
  const auto signal = chrom.signal();
  const double peak_max = *std::max_element(signal.begin(), signal.end());
  const Frame f{4.5 * font_px + 10, 2.0 * font_px + 10, w - 20, h - 3.5 * font_px - 10,
                static_cast<double>(chrom.size() - 1), std::max(peak_max * 1.1, 1.0)};

  const auto x_ticks = ticks(f.x_max, 8);
  const auto y_ticks = ticks(f.y_max, 5);

  // SVG
  std::ostringstream svg;
  svg << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << style.width_px << R"(" height=")"
      << style.height_px << R"(" viewBox="0 0 )" << style.width_px << ' ' << style.height_px
      << R"(" font-family="sans-serif" font-size=")" << num(font_px) << R"(">)" << '\n';
  svg << R"(<rect width="100%" height="100%" fill="#ffffff"/>)" << '\n';

  for (const PeakResult& p : peaks) {
    svg << R"(<polygon class="peak-area" fill=")" << style.line_color << R"(" fill-opacity="0.25" points=")";
    svg << num(f.px(static_cast<double>(p.bounds.start_idx))) << ',' << num(f.py(0));
    for (std::size_t i = p.bounds.start_idx; i <= p.bounds.end_idx; ++i) {
      svg << ' ' << num(f.px(static_cast<double>(i))) << ',' << num(f.py(signal[i]));
    }
    svg << ' ' << num(f.px(static_cast<double>(p.bounds.end_idx))) << ',' << num(f.py(0)) << R"("/>)" << '\n';
  }

  svg << R"(<g class="axes" stroke="#000000" stroke-width="1">)" << '\n';
  svg << R"(<line x1=")" << num(f.left) << R"(" y1=")" << num(f.bottom) << R"(" x2=")" << num(f.right)
      << R"(" y2=")" << num(f.bottom) << R"("/>)" << '\n';
  svg << R"(<line x1=")" << num(f.left) << R"(" y1=")" << num(f.top) << R"(" x2=")" << num(f.left)
      << R"(" y2=")" << num(f.bottom) << R"("/>)" << '\n';
  svg << "</g>\n";
  for (double t : x_ticks) {
    svg << R"(<text class="tick" x=")" << num(f.px(t)) << R"(" y=")" << num(f.bottom + font_px + 4)
        << R"(" text-anchor="middle">)" << tick_label(t) << "</text>\n";
  }
  for (double t : y_ticks) {
    svg << R"(<text class="tick" x=")" << num(f.left - 6) << R"(" y=")" << num(f.py(t) + font_px / 3)
        << R"(" text-anchor="end">)" << tick_label(t) << "</text>\n";
  }
  svg << R"(<text class="axis-label" x=")" << num((f.left + f.right) / 2) << R"(" y=")"
      << num(h - font_px / 2 - 4) << R"(" text-anchor="middle">)" << xml_escape(style.x_label) << "</text>\n";
  svg << R"(<text class="axis-label" x=")" << num(font_px) << R"(" y=")" << num((f.top + f.bottom) / 2)
      << R"(" text-anchor="middle" transform="rotate(-90 )" << num(font_px) << ' '
      << num((f.top + f.bottom) / 2) << R"lit()">)lit" << xml_escape(style.y_label) << "</text>\n";

  for (auto [idx, name] : {std::pair{chrom.seed_idx(), "seed"}, std::pair{chrom.front_idx(), "front"}}) {
    svg << R"(<line class="marker )" << name << R"(" x1=")" << num(f.px(static_cast<double>(idx)))
        << R"(" y1=")" << num(f.top) << R"(" x2=")" << num(f.px(static_cast<double>(idx))) << R"(" y2=")"
        << num(f.bottom) << R"(" stroke="#555555" stroke-dasharray="6,4"/>)" << '\n';
  }

  svg << R"(<polyline class="signal" fill="none" stroke=")" << style.line_color
      << R"(" stroke-width="1.5" points=")";
  for (std::size_t i = 0; i < signal.size(); ++i) {
    if (i) svg << ' ';
    svg << num(f.px(static_cast<double>(i))) << ',' << num(f.py(signal[i]));
  }
  svg << R"("/>)" << '\n';

  for (const PeakResult& p : peaks) {
    svg << R"(<text class="peak-label" x=")" << num(f.px(static_cast<double>(p.apex_idx))) << R"(" y=")"
        << num(f.py(signal[p.apex_idx]) - 6) << R"(" text-anchor="middle" font-weight="bold">)" << p.number
        << "</text>\n";
  }
  svg << "</svg>\n";

  // Raster
  cv::Mat img(style.height_px, style.width_px, CV_8UC3, cv::Scalar(255, 255, 255));
  const cv::Scalar black(0, 0, 0);
  const cv::Scalar color = bgr(line);
  const double scale = font_px / 22.0;
  const int thickness = std::max(1, static_cast<int>(std::lround(scale)));
  auto pt = [&](double x, double y) { return cv::Point(static_cast<int>(std::lround(x)), static_cast<int>(std::lround(y))); };

  if (!peaks.empty()) {
    cv::Mat shade = img.clone();
    for (const PeakResult& p : peaks) {
      std::vector<cv::Point> poly;
      poly.push_back(pt(f.px(static_cast<double>(p.bounds.start_idx)), f.py(0)));
      for (std::size_t i = p.bounds.start_idx; i <= p.bounds.end_idx; ++i) {
        poly.push_back(pt(f.px(static_cast<double>(i)), f.py(signal[i])));
      }
      poly.push_back(pt(f.px(static_cast<double>(p.bounds.end_idx)), f.py(0)));
      cv::fillPoly(shade, std::vector<std::vector<cv::Point>>{poly}, color, cv::LINE_AA);
    }
    cv::addWeighted(shade, 0.25, img, 0.75, 0.0, img);
  }

  cv::line(img, pt(f.left, f.bottom), pt(f.right, f.bottom), black, 1);
  cv::line(img, pt(f.left, f.top), pt(f.left, f.bottom), black, 1);
  auto put_text = [&](const std::string& text, double cx, double baseline, bool centered) {
    int base = 0;
    const cv::Size sz = cv::getTextSize(text, cv::FONT_HERSHEY_SIMPLEX, scale, thickness, &base);
    const double x = centered ? cx - sz.width / 2.0 : cx - sz.width;
    cv::putText(img, text, pt(x, baseline), cv::FONT_HERSHEY_SIMPLEX, scale, black, thickness, cv::LINE_AA);
  };
  for (double t : x_ticks) {
    cv::line(img, pt(f.px(t), f.bottom), pt(f.px(t), f.bottom + 4), black, 1);
    put_text(tick_label(t), f.px(t), f.bottom + font_px + 4, true);
  }
  for (double t : y_ticks) {
    cv::line(img, pt(f.left - 4, f.py(t)), pt(f.left, f.py(t)), black, 1);
    put_text(tick_label(t), f.left - 6, f.py(t) + font_px / 3, false);
  }
  put_text(style.x_label, (f.left + f.right) / 2, h - font_px / 2 - 4, true);
  {
    int base = 0;
    const cv::Size sz = cv::getTextSize(style.y_label, cv::FONT_HERSHEY_SIMPLEX, scale, thickness, &base);
    cv::Mat label(sz.height + base + 4, sz.width + 4, CV_8UC3, cv::Scalar(255, 255, 255));
    cv::putText(label, style.y_label, {2, sz.height + 2}, cv::FONT_HERSHEY_SIMPLEX, scale, black, thickness,
                cv::LINE_AA);
    cv::rotate(label, label, cv::ROTATE_90_COUNTERCLOCKWISE);
    const int x = std::max(0, static_cast<int>(font_px / 2) - label.cols / 2 + 2);
    const int y = std::max(0, static_cast<int>((f.top + f.bottom) / 2) - label.rows / 2);
    if (x + label.cols <= img.cols && y + label.rows <= img.rows) {
      label.copyTo(img(cv::Rect(x, y, label.cols, label.rows)));
    }
  }
  for (std::size_t idx : {chrom.seed_idx(), chrom.front_idx()}) {
    dashed_vline(img, static_cast<int>(std::lround(f.px(static_cast<double>(idx)))),
                 static_cast<int>(f.top), static_cast<int>(f.bottom), cv::Scalar(85, 85, 85));
  }
  std::vector<cv::Point> curve;
  for (std::size_t i = 0; i < signal.size(); ++i) curve.push_back(pt(f.px(static_cast<double>(i)), f.py(signal[i])));
  cv::polylines(img, curve, false, color, 2, cv::LINE_AA);
  for (const PeakResult& p : peaks) {
    put_text(std::to_string(p.number), f.px(static_cast<double>(p.apex_idx)), f.py(signal[p.apex_idx]) - 6, true);
  }

  std::vector<Rgb> pixels;
  pixels.reserve(img.total());
  for (int y = 0; y < img.rows; ++y) {
    const auto* row = img.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.cols; ++x) pixels.push_back({row[3 * x + 2], row[3 * x + 1], row[3 * x]});
  }
  return {RgbImage(img.cols, img.rows, std::move(pixels)), svg.str()};
}

ChromatogramFiles write_chromatogram(const fs::path& dir, int run_number, const RenderedChromatogram& rendered) {
  const std::string stem = chromatogram_file_stem(run_number);
  ChromatogramFiles files{dir / (stem + ".png"), dir / (stem + ".svg")};
  write_file(files.png, encode_png(rendered.raster));
  write_file(files.svg, std::span(reinterpret_cast<const std::uint8_t*>(rendered.svg.data()),
                                  rendered.svg.size()));
  return files;
}

}  // namespace lanescan
