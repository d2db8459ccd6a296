#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lanescan/lane.hpp"

namespace lanescan {

/// Mean inverted intensity along a lane, indexed by migration distance.
///
/// Index 0 is the bottom crop row (seed side) and indices grow toward the
/// solvent front, one sample per pixel row. Values lie in [0, 255].
class Chromatogram {
 public:
  Chromatogram(std::vector<double> signal, std::size_t seed_idx, std::size_t front_idx);

  std::span<const double> signal() const noexcept { return signal_; }
  std::size_t size() const noexcept { return signal_.size(); }
  double operator[](std::size_t i) const { return signal_[i]; }

  std::size_t seed_idx() const noexcept { return seed_idx_; }
  std::size_t front_idx() const noexcept { return front_idx_; }

  /// Crop row that produced sample `i`.
  int row_of(std::size_t i) const noexcept {
    return static_cast<int>(signal_.size() - 1 - i);
  }

 private:
  std::vector<double> signal_;
  std::size_t seed_idx_;
  std::size_t front_idx_;
};

/// signal[i] = mean over columns of (255 - gray) on crop row row_of(i).
/// Throws Error(InvalidArgument) if the crop has no marks.
Chromatogram compute_profile(const LaneCrop& crop);

}  // namespace lanescan
