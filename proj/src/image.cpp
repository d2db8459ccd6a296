#include "lanescan/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "lanescan/error.hpp"

namespace lanescan {

namespace {

void check_dims(int width, int height, std::size_t count) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::InvalidArgument, "image dimensions must be at least 1x1");
  }
  if (count != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw Error(ErrorCode::InvalidArgument, "pixel count does not match width x height");
  }
}

std::uint8_t to_8bit(const cv::Mat& m, int row, int col, int channel) {
  const int channels = m.channels();
  if (m.depth() == CV_16U) {
    return static_cast<std::uint8_t>(m.ptr<std::uint16_t>(row)[col * channels + channel] >> 8);
  }
  return m.ptr<std::uint8_t>(row)[col * channels + channel];
}

// Composite a channel over a white background.
std::uint8_t over_white(std::uint8_t c, std::uint8_t alpha) {
  const int v = c * alpha + 255 * (255 - alpha);
  return static_cast<std::uint8_t>((v + 127) / 255);
}

}  // namespace

RgbImage::RgbImage(int width, int height, std::vector<Rgb> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dims(width_, height_, pixels_.size());
}

RgbImage::RgbImage(int width, int height, Rgb fill)
    : RgbImage(width, height,
               std::vector<Rgb>(static_cast<std::size_t>(std::max(width, 0)) *
                                    static_cast<std::size_t>(std::max(height, 0)),
                                fill)) {}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dims(width_, height_, pixels_.size());
}

GrayImage::GrayImage(int width, int height, std::uint8_t fill)
    : GrayImage(width, height,
                std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                              static_cast<std::size_t>(std::max(height, 0)),
                                          fill)) {}

RgbImage decode_image(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) {
    throw Error(ErrorCode::UnsupportedFormat, "image data is empty");
  }
  cv::Mat decoded;
  try {
    const cv::Mat raw(1, static_cast<int>(bytes.size()), CV_8UC1,
                      const_cast<std::uint8_t*>(bytes.data()));
    decoded = cv::imdecode(raw, cv::IMREAD_UNCHANGED);
  } catch (const cv::Exception&) {
    decoded.release();
  }
  if (decoded.empty()) {
    throw Error(ErrorCode::UnsupportedFormat, "image data could not be decoded");
  }
  if (decoded.depth() != CV_8U && decoded.depth() != CV_16U) {
    throw Error(ErrorCode::UnsupportedFormat, "only 8- and 16-bit integer samples are supported");
  }

  const int channels = decoded.channels();
  if (channels < 1 || channels > 4) {
    throw Error(ErrorCode::UnsupportedFormat, "unsupported channel count");
  }

  std::vector<Rgb> pixels;
  pixels.reserve(decoded.total());
  for (int y = 0; y < decoded.rows; ++y) {
    for (int x = 0; x < decoded.cols; ++x) {
      Rgb px;
      std::uint8_t alpha = 255;
      if (channels <= 2) {
        const std::uint8_t v = to_8bit(decoded, y, x, 0);
        px = {v, v, v};
        if (channels == 2) alpha = to_8bit(decoded, y, x, 1);
      } else {
        // OpenCV orders channels B, G, R[, A].
        px = {to_8bit(decoded, y, x, 2), to_8bit(decoded, y, x, 1), to_8bit(decoded, y, x, 0)};
        if (channels == 4) alpha = to_8bit(decoded, y, x, 3);
      }
      if (alpha != 255) {
        px = {over_white(px.r, alpha), over_white(px.g, alpha), over_white(px.b, alpha)};
      }
      pixels.push_back(px);
    }
  }
  return RgbImage(decoded.cols, decoded.rows, std::move(pixels));
}

RgbImage load_image(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::FileUnreadable, "cannot read image file: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::FileUnreadable, "cannot open image file: " + path.string());
  }
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw Error(ErrorCode::FileUnreadable, "error while reading image file: " + path.string());
  }
  try {
    return decode_image(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::uint8_t luma(Rgb px) noexcept {
  // Integer form of round(0.299 r + 0.587 g + 0.114 b), ties upward.
  const int weighted = 299 * px.r + 587 * px.g + 114 * px.b;
  return static_cast<std::uint8_t>(std::min((weighted + 500) / 1000, 255));
}

GrayImage to_grayscale(const RgbImage& img) {
  std::vector<std::uint8_t> out;
  out.reserve(img.pixels().size());
  for (const Rgb& px : img.pixels()) out.push_back(luma(px));
  return GrayImage(img.width(), img.height(), std::move(out));
}

namespace {

GrayImage rotate_quarter_turns(const GrayImage& img, int quarter_turns) {
  const int w = img.width();
  const int h = img.height();
  switch (quarter_turns) {
    case 0:
      return img;
    case 1: {
      GrayImage out(h, w, std::uint8_t{255});
      for (int y = 0; y < w; ++y)
        for (int x = 0; x < h; ++x) out.at(x, y) = img.at(w - 1 - y, x);
      return out;
    }
    case 2: {
      GrayImage out(w, h, std::uint8_t{255});
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out.at(x, y) = img.at(w - 1 - x, h - 1 - y);
      return out;
    }
    default: {
      GrayImage out(h, w, std::uint8_t{255});
      for (int y = 0; y < w; ++y)
        for (int x = 0; x < h; ++x) out.at(x, y) = img.at(y, h - 1 - x);
      return out;
    }
  }
}

}  // namespace

GrayImage rotate(const GrayImage& img, double degrees) {
  if (!std::isfinite(degrees)) {
    throw Error(ErrorCode::NonFiniteAngle, "rotation angle must be finite");
  }
  if (std::fmod(degrees, 90.0) == 0.0) {
    const double turns = std::fmod(degrees / 90.0, 4.0);
    const int quarter = (static_cast<int>(turns) % 4 + 4) % 4;
    return rotate_quarter_turns(img, quarter);
  }

  const double theta = degrees * std::numbers::pi / 180.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const int w = img.width();
  const int h = img.height();
  constexpr double kEps = 1e-9;

  const int out_w = std::max(1, static_cast<int>(std::ceil(w * std::abs(c) + h * std::abs(s) - kEps)));
  const int out_h = std::max(1, static_cast<int>(std::ceil(w * std::abs(s) + h * std::abs(c) - kEps)));

  const double src_cx = (w - 1) / 2.0;
  const double src_cy = (h - 1) / 2.0;
  const double dst_cx = (out_w - 1) / 2.0;
  const double dst_cy = (out_h - 1) / 2.0;

  GrayImage out(out_w, out_h, std::uint8_t{255});
  for (int y = 0; y < out_h; ++y) {
    for (int x = 0; x < out_w; ++x) {
      // Inverse map: rotate the destination offset by -theta in y-up coordinates.
      const double dx = x - dst_cx;
      const double up = -(y - dst_cy);
      const double sx = src_cx + (dx * c + up * s);
      const double sy = src_cy - (-dx * s + up * c);
      if (sx < -0.5 - kEps || sx > w - 0.5 + kEps || sy < -0.5 - kEps || sy > h - 0.5 + kEps) {
        continue;
      }
      const double px = std::clamp(sx, 0.0, static_cast<double>(w - 1));
      const double py = std::clamp(sy, 0.0, static_cast<double>(h - 1));
      const int x0 = static_cast<int>(std::floor(px));
      const int y0 = static_cast<int>(std::floor(py));
      const int x1 = std::min(x0 + 1, w - 1);
      const int y1 = std::min(y0 + 1, h - 1);
      const double fx = px - x0;
      const double fy = py - y0;
      const double top = img.at(x0, y0) * (1.0 - fx) + img.at(x1, y0) * fx;
      const double bottom = img.at(x0, y1) * (1.0 - fx) + img.at(x1, y1) * fx;
      const double v = top * (1.0 - fy) + bottom * fy;
      out.at(x, y) = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
    }
  }
  return out;
}

std::vector<std::uint8_t> encode_png(const GrayImage& img) {
  const cv::Mat m(img.height(), img.width(), CV_8UC1,
                  const_cast<std::uint8_t*>(img.pixels().data()));
  std::vector<std::uint8_t> buf;
  if (!cv::imencode(".png", m, buf)) {
    throw Error(ErrorCode::IoError, "PNG encoding failed");
  }
  return buf;
}

std::vector<std::uint8_t> encode_png(const RgbImage& img) {
  cv::Mat m(img.height(), img.width(), CV_8UC3);
  for (int y = 0; y < img.height(); ++y) {
    auto* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < img.width(); ++x) {
      const Rgb& px = img.at(x, y);
      row[3 * x] = px.b;
      row[3 * x + 1] = px.g;
      row[3 * x + 2] = px.r;
    }
  }
  std::vector<std::uint8_t> buf;
  if (!cv::imencode(".png", m, buf)) {
    throw Error(ErrorCode::IoError, "PNG encoding failed");
  }
  return buf;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::IoError, "cannot open for writing: " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorCode::IoError, "write failed: " + path.string());
  }
}

}  // namespace lanescan
