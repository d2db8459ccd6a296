#include "lanescan/chromatogram.hpp"

#include <cmath>

#include "lanescan/error.hpp"

namespace lanescan {

Chromatogram::Chromatogram(std::vector<double> signal, std::size_t seed_idx, std::size_t front_idx)
    : signal_(std::move(signal)), seed_idx_(seed_idx), front_idx_(front_idx) {
  if (signal_.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "chromatogram needs at least 2 samples");
  }
  if (!(seed_idx_ < front_idx_) || front_idx_ >= signal_.size()) {
    throw Error(ErrorCode::InvalidArgument, "chromatogram requires seed_idx < front_idx < length");
  }
  for (double v : signal_) {
    if (!std::isfinite(v) || v < 0.0 || v > 255.0) {
      throw Error(ErrorCode::InvalidArgument, "chromatogram samples must lie in [0, 255]");
    }
  }
}

Chromatogram compute_profile(const LaneCrop& crop) {
  if (!crop.marks) {
    throw Error(ErrorCode::InvalidArgument, "seed and front must be marked before profiling");
  }
  const GrayImage& px = crop.pixels;
  const auto height = static_cast<std::size_t>(px.height());
  const double width = px.width();

  std::vector<double> signal(height);
  for (std::size_t i = 0; i < height; ++i) {
    const int row = static_cast<int>(height - 1 - i);
    long inverted = 0;
    for (std::uint8_t v : px.row(row)) inverted += 255 - v;
    signal[i] = static_cast<double>(inverted) / width;
  }
  const auto seed_idx = height - 1 - static_cast<std::size_t>(crop.marks->seed_row);
  const auto front_idx = height - 1 - static_cast<std::size_t>(crop.marks->front_row);
  return Chromatogram(std::move(signal), seed_idx, front_idx);
}

}  // namespace lanescan
