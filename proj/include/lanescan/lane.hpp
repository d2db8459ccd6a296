#pragma once

#include <optional>

#include "lanescan/image.hpp"

namespace lanescan {

/// A pointer position in working-image pixel space.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Half-open rectangle: [x0, x1) x [y0, y1).
struct LaneRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const noexcept { return x1 - x0; }
  int height() const noexcept { return y1 - y0; }

  friend bool operator==(const LaneRect&, const LaneRect&) = default;
};

/// Seed and solvent-front rows within a crop (row 0 = top of the crop).
/// The seed is always strictly below the front.
struct LaneMarks {
  int seed_row = 0;
  int front_row = 0;

  friend bool operator==(const LaneMarks&, const LaneMarks&) = default;
};

struct LaneCrop {
  LaneRect rect;
  GrayImage pixels;
  std::optional<LaneMarks> marks;
};

/// Builds the lane rectangle from two opposite-corner clicks given in any
/// order. Clicks are clamped into the image and floored to pixel indices.
/// Throws Error(DegenerateSelection) when both clicks fall in the same pixel
/// column or the same pixel row.
LaneRect make_rect(Point a, Point b, int image_w, int image_h);

/// Pixel-exact copy of `rect`. Throws Error(RectOutOfBounds).
LaneCrop crop(const GrayImage& img, const LaneRect& rect);

/// Rounds both clicks to rows within the crop; the lower one becomes the
/// seed. Throws Error(CoincidentMarks) when they land on the same row.
LaneMarks make_marks(double seed_click_y, double front_click_y, int crop_height);

}  // namespace lanescan
