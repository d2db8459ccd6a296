#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace lanescan {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major 8-bit color raster. Row 0 is the top of the image.
class RgbImage {
 public:
  RgbImage(int width, int height, std::vector<Rgb> pixels);
  RgbImage(int width, int height, Rgb fill);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::span<const Rgb> pixels() const noexcept { return pixels_; }

  const Rgb& at(int x, int y) const { return pixels_[index(x, y)]; }
  Rgb& at(int x, int y) { return pixels_[index(x, y)]; }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<Rgb> pixels_;
};

/// Row-major 8-bit intensity raster. Row 0 is the top of the image; larger
/// rows sit lower on the plate, toward the seed line.
class GrayImage {
 public:
  GrayImage(int width, int height, std::vector<std::uint8_t> pixels);
  GrayImage(int width, int height, std::uint8_t fill);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }

  std::span<const std::uint8_t> row(int y) const {
    return std::span<const std::uint8_t>(pixels_).subspan(index(0, y),
                                                          static_cast<std::size_t>(width_));
  }

  std::uint8_t at(int x, int y) const { return pixels_[index(x, y)]; }
  std::uint8_t& at(int x, int y) { return pixels_[index(x, y)]; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;
};

/// Reads a PNG, JPEG, BMP or TIFF file. Sixteen-bit samples keep their high
/// byte, single-channel sources expand to neutral triples and alpha is
/// composited over white.
///
/// Throws Error(FileUnreadable) when the file cannot be opened and
/// Error(UnsupportedFormat) when its bytes do not decode.
RgbImage load_image(const std::filesystem::path& path);

/// Same normalization as load_image, from an in-memory encoded buffer.
RgbImage decode_image(std::span<const std::uint8_t> bytes);

/// Rec. 601 luma, rounded half-up.
std::uint8_t luma(Rgb px) noexcept;

GrayImage to_grayscale(const RgbImage& img);

/// Rotates counterclockwise by `degrees` about the image center onto the
/// axis-aligned bounding canvas of the rotated extent. Multiples of 90 are
/// exact pixel permutations; other angles sample bilinearly, and canvas
/// pixels that map outside the source are filled with white (255).
///
/// Throws Error(NonFiniteAngle).
GrayImage rotate(const GrayImage& img, double degrees);

/// Lossless 8-bit PNG encodings.
std::vector<std::uint8_t> encode_png(const GrayImage& img);
std::vector<std::uint8_t> encode_png(const RgbImage& img);

/// Writes `bytes` to `path`, replacing any existing file. Throws Error(IoError).
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace lanescan
