#include "lanescan/peaks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lanescan/error.hpp"

namespace lanescan {

namespace {

void check_bounds(const Chromatogram& chrom, PeakBounds bounds) {
  if (!(bounds.start_idx < bounds.end_idx) || bounds.end_idx >= chrom.size()) {
    throw Error(ErrorCode::InvalidBounds,
                "peak bounds must satisfy start < end < " + std::to_string(chrom.size()));
  }
}

}  // namespace

std::string_view to_string(BaselineMode mode) noexcept {
  return mode == BaselineMode::Raw ? "raw" : "linear";
}

BaselineMode parse_baseline(std::string_view text) {
  if (text == "raw") return BaselineMode::Raw;
  if (text == "linear") return BaselineMode::LinearChord;
  throw Error(ErrorCode::InvalidArgument,
              "baseline must be \"raw\" or \"linear\", got \"" + std::string(text) + "\"");
}

SnappedPoint snap_click(const Chromatogram& chrom, double click_x, double /*click_y*/) {
  if (std::isnan(click_x)) {
    throw Error(ErrorCode::InvalidArgument, "click x must be a number");
  }
  const double last = static_cast<double>(chrom.size() - 1);
  const auto idx = static_cast<std::size_t>(std::round(std::clamp(click_x, 0.0, last)));
  return {idx, chrom[idx]};
}

double integrate_peak(const Chromatogram& chrom, PeakBounds bounds, BaselineMode mode) {
  check_bounds(chrom, bounds);
  const std::size_t a = bounds.start_idx;
  const std::size_t b = bounds.end_idx;

  auto sample = [&](std::size_t i) { return chrom[i]; };
  double area = 0.0;
  if (mode == BaselineMode::Raw) {
    for (std::size_t i = a; i < b; ++i) area += (sample(i) + sample(i + 1)) / 2.0;
    return area;
  }

  const double span = static_cast<double>(b - a);
  const double ya = chrom[a];
  const double yb = chrom[b];
  auto adjusted = [&](std::size_t i) {
    const double t = static_cast<double>(i - a) / span;
    return std::max(0.0, chrom[i] - (ya + t * (yb - ya)));
  };
  for (std::size_t i = a; i < b; ++i) area += (adjusted(i) + adjusted(i + 1)) / 2.0;
  return area;
}

std::size_t find_apex(const Chromatogram& chrom, PeakBounds bounds) {
  check_bounds(chrom, bounds);
  std::size_t best = bounds.start_idx;
  for (std::size_t i = bounds.start_idx + 1; i <= bounds.end_idx; ++i) {
    if (chrom[i] > chrom[best]) best = i;
  }
  return best;
}

double compute_rf(std::size_t apex_idx, std::size_t seed_idx, std::size_t front_idx) {
  if (seed_idx >= front_idx) {
    throw Error(ErrorCode::DegenerateFront, "solvent front must lie beyond the seed point");
  }
  const double travelled = static_cast<double>(apex_idx) - static_cast<double>(seed_idx);
  const double front = static_cast<double>(front_idx - seed_idx);
  return std::clamp(travelled / front, 0.0, 1.0);
}

std::vector<PeakResult> analyze_run(const Chromatogram& chrom, std::span<const PeakClick> clicks,
                                    BaselineMode mode) {
  if (clicks.empty()) {
    throw Error(ErrorCode::EmptyPeakSet, "select at least one peak");
  }

  std::vector<PeakResult> results;
  results.reserve(clicks.size());
  for (std::size_t k = 0; k < clicks.size(); ++k) {
    const std::size_t s = snap_click(chrom, clicks[k].start.x, clicks[k].start.y).idx;
    const std::size_t e = snap_click(chrom, clicks[k].end.x, clicks[k].end.y).idx;
    if (s == e) {
      throw Error(ErrorCode::InvalidBounds,
                  "peak " + std::to_string(k + 1) +
                      " starts and ends on the same sample; select its start and end again");
    }
    PeakResult r;
    r.number = static_cast<int>(k + 1);
    r.bounds = {std::min(s, e), std::max(s, e)};
    results.push_back(r);
  }

  std::vector<const PeakResult*> order;
  for (const auto& r : results) order.push_back(&r);
  std::sort(order.begin(), order.end(), [](const PeakResult* l, const PeakResult* r) {
    return l->bounds.start_idx < r->bounds.start_idx;
  });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (order[k]->bounds.start_idx < order[k - 1]->bounds.end_idx) {
      throw Error(ErrorCode::OverlappingPeaks,
                  "peaks " + std::to_string(order[k - 1]->number) + " and " +
                      std::to_string(order[k]->number) +
                      " overlap; select the peaks again so they share at most an endpoint");
    }
  }

  double total = 0.0;
  for (auto& r : results) {
    r.area = integrate_peak(chrom, r.bounds, mode);
    r.apex_idx = find_apex(chrom, r.bounds);
    r.rf = compute_rf(r.apex_idx, chrom.seed_idx(), chrom.front_idx());
    total += r.area;
  }
  if (!(total > 0.0)) {
    throw Error(ErrorCode::ZeroTotalArea,
                "the selected peaks enclose no area, so percentages are undefined");
  }
  for (auto& r : results) r.percent = 100.0 * r.area / total;
  return results;
}

}  // namespace lanescan
