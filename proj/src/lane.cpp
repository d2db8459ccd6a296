#include "lanescan/lane.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lanescan/error.hpp"

namespace lanescan {

namespace {

int clamp_floor(double v, int size) {
  return static_cast<int>(std::floor(std::clamp(v, 0.0, static_cast<double>(size - 1))));
}

void require_finite(Point p, const char* what) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " click must have finite coordinates");
  }
}

}  // namespace

LaneRect make_rect(Point a, Point b, int image_w, int image_h) {
  if (image_w < 1 || image_h < 2) {
    throw Error(ErrorCode::InvalidArgument, "image must be at least 1 pixel wide and 2 pixels tall");
  }
  require_finite(a, "first");
  require_finite(b, "second");

  const int ax = clamp_floor(a.x, image_w);
  const int bx = clamp_floor(b.x, image_w);
  const int ay = clamp_floor(a.y, image_h);
  const int by = clamp_floor(b.y, image_h);

  if (ax == bx || ay == by) {
    throw Error(ErrorCode::DegenerateSelection,
                "lane selection has zero width or height; select two opposite corners of the lane again");
  }
  return LaneRect{std::min(ax, bx), std::min(ay, by), std::max(ax, bx) + 1, std::max(ay, by) + 1};
}

LaneCrop crop(const GrayImage& img, const LaneRect& rect) {
  if (rect.x0 < 0 || rect.y0 < 0 || rect.x1 > img.width() || rect.y1 > img.height() ||
      rect.x0 >= rect.x1 || rect.y0 >= rect.y1) {
    throw Error(ErrorCode::RectOutOfBounds, "lane rectangle lies outside the image");
  }
  std::vector<std::uint8_t> pixels;
  pixels.reserve(static_cast<std::size_t>(rect.width()) * static_cast<std::size_t>(rect.height()));
  for (int y = rect.y0; y < rect.y1; ++y) {
    const auto row = img.row(y).subspan(static_cast<std::size_t>(rect.x0),
                                        static_cast<std::size_t>(rect.width()));
    pixels.insert(pixels.end(), row.begin(), row.end());
  }
  return LaneCrop{rect, GrayImage(rect.width(), rect.height(), std::move(pixels)), std::nullopt};
}

LaneMarks make_marks(double seed_click_y, double front_click_y, int crop_height) {
  if (crop_height < 2) {
    throw Error(ErrorCode::InvalidArgument, "crop must be at least 2 rows tall");
  }
  if (!std::isfinite(seed_click_y) || !std::isfinite(front_click_y)) {
    throw Error(ErrorCode::InvalidArgument, "mark clicks must be finite");
  }
  const double last = static_cast<double>(crop_height - 1);
  const int a = static_cast<int>(std::round(std::clamp(seed_click_y, 0.0, last)));
  const int b = static_cast<int>(std::round(std::clamp(front_click_y, 0.0, last)));
  if (a == b) {
    throw Error(ErrorCode::CoincidentMarks,
                "seed and solvent front fall on the same row; mark both points again");
  }
  return LaneMarks{std::max(a, b), std::min(a, b)};
}

}  // namespace lanescan
