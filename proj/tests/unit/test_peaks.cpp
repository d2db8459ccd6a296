#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "lanescan/error.hpp"
#include "lanescan/peaks.hpp"
#include "oracles.hpp"

using namespace lanescan;

namespace {

Chromatogram chrom_of(std::vector<double> signal) {
  const std::size_t n = signal.size();
  return Chromatogram(std::move(signal), 0, n - 1);
}

ErrorCode error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

PeakClick click(double start, double end) { return {{start, 0.0}, {end, 0.0}}; }

}  // namespace

TEST_CASE("snap_click rounds x, clamps, and ignores y") {
  const auto c = chrom_of({0, 10, 20});
  const auto s = snap_click(c, 1.2, 999.0);
  CHECK(s.idx == 1);
  CHECK(s.value == 10.0);
  CHECK(snap_click(c, -5.0, 0.0).idx == 0);
  CHECK(snap_click(c, -5.0, 0.0).value == 0.0);
  CHECK(snap_click(c, 77.0, 0.0).idx == 2);
  CHECK(snap_click(c, 1.2, -999.0).idx == snap_click(c, 1.2, 999.0).idx);
  CHECK(snap_click(c, 1.2, -999.0).value == snap_click(c, 1.2, 999.0).value);
}

TEST_CASE("snap_click is independent of click height") {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> x(-10.0, 60.0);
  std::uniform_real_distribution<double> y(-1e6, 1e6);
  std::uniform_real_distribution<double> v(0.0, 255.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> sig(50);
    for (auto& s : sig) s = v(rng);
    const auto c = chrom_of(sig);
    const double cx = x(rng);
    const auto a = snap_click(c, cx, y(rng));
    const auto b = snap_click(c, cx, y(rng));
    CHECK(a.idx == b.idx);
    CHECK(a.value == b.value);
    CHECK(a.value == c[a.idx]);
  }
}

TEST_CASE("integrate_peak examples") {
  const auto tri = chrom_of({0, 1, 2, 1, 0});
  CHECK(integrate_peak(tri, {0, 4}, BaselineMode::Raw) == 4.0);

  const auto flat = chrom_of({5, 5, 5, 5});
  CHECK(integrate_peak(flat, {0, 3}, BaselineMode::Raw) == 15.0);
  CHECK(integrate_peak(flat, {0, 3}, BaselineMode::LinearChord) == 0.0);

  // Triangle on a sloped pedestal: the chord removes the pedestal only.
  const auto sloped = chrom_of({10, 13, 16, 13, 14});
  CHECK(integrate_peak(sloped, {0, 4}, BaselineMode::LinearChord) == doctest::Approx(6.0));

  // Concave segments clamp at zero instead of going negative.
  const auto dip = chrom_of({10, 0, 10});
  CHECK(integrate_peak(dip, {0, 2}, BaselineMode::LinearChord) == 0.0);
}

TEST_CASE("integrate_peak rejects invalid bounds") {
  const auto c = chrom_of({1, 2, 3});
  CHECK(error_of([&] { integrate_peak(c, {1, 1}, BaselineMode::Raw); }) == ErrorCode::InvalidBounds);
  CHECK(error_of([&] { integrate_peak(c, {2, 1}, BaselineMode::Raw); }) == ErrorCode::InvalidBounds);
  CHECK(error_of([&] { integrate_peak(c, {0, 3}, BaselineMode::Raw); }) == ErrorCode::InvalidBounds);
}

TEST_CASE("Gaussian peaks match the summation oracle and the analytic integral") {
  for (double sigma : {3.0, 4.5, 8.0, 12.0}) {
    const double amplitude = 200.0;
    const double mu = 150.3;
    std::vector<double> sig(301);
    for (std::size_t i = 0; i < sig.size(); ++i) {
      const double d = static_cast<double>(i) - mu;
      sig[i] = amplitude * std::exp(-d * d / (2.0 * sigma * sigma));
    }
    const auto c = chrom_of(sig);
    const double area = integrate_peak(c, {0, 300}, BaselineMode::Raw);
    const double summed = oracles::trapezoid_long_double(sig, 0, 300);
    CHECK(std::abs(area - summed) <= 1e-12 * summed);
    const double analytic = amplitude * sigma * std::sqrt(2.0 * std::acos(-1.0));
    CHECK(std::abs(area - analytic) <= 1e-3 * analytic);
  }
}

TEST_CASE("trapezoid rule is exact on piecewise-affine signals") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pw = oracles::random_piecewise_affine(rng);
    const auto c = chrom_of(pw.samples);
    const double area = integrate_peak(c, {0, pw.samples.size() - 1}, BaselineMode::Raw);
    CHECK(std::abs(area - pw.integral) <= 1e-12 * std::max(1.0, std::abs(pw.integral)));
  }
}

TEST_CASE("raw areas are additive over adjacent intervals") {
  std::mt19937 rng(43);
  std::uniform_real_distribution<double> v(0.0, 255.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> sig(40);
    for (auto& s : sig) s = v(rng);
    const auto c = chrom_of(sig);
    std::uniform_int_distribution<std::size_t> pick(1, 38);
    const std::size_t mid = pick(rng);
    const double whole = integrate_peak(c, {0, 39}, BaselineMode::Raw);
    const double parts = integrate_peak(c, {0, mid}, BaselineMode::Raw) + integrate_peak(c, {mid, 39}, BaselineMode::Raw);
    CHECK(whole == doctest::Approx(parts).epsilon(1e-12));
  }
}

TEST_CASE("find_apex picks the maximum, ties toward the seed") {
  CHECK(find_apex(chrom_of({0, 3, 9, 3, 0}), {0, 4}) == 2);
  CHECK(find_apex(chrom_of({0, 7, 7, 0}), {0, 3}) == 1);
  CHECK(find_apex(chrom_of({4, 4, 4}), {0, 2}) == 0);
  CHECK(find_apex(chrom_of({9, 1, 2, 1, 0}), {1, 4}) == 2);
}

TEST_CASE("compute_rf examples and guard") {
  CHECK(compute_rf(90, 10, 90) == 1.0);
  CHECK(compute_rf(10, 10, 90) == 0.0);
  CHECK(compute_rf(50, 10, 90) == 0.5);
  CHECK(compute_rf(5, 10, 90) == 0.0);
  CHECK(compute_rf(120, 10, 90) == 1.0);
  CHECK(error_of([] { compute_rf(5, 10, 10); }) == ErrorCode::DegenerateFront);
  CHECK(error_of([] { compute_rf(5, 11, 10); }) == ErrorCode::DegenerateFront);
}

TEST_CASE("compute_rf is bounded and strictly increasing between seed and front") {
  for (std::size_t seed = 0; seed < 20; seed += 3) {
    for (std::size_t front = seed + 1; front < 60; front += 7) {
      double prev = -1.0;
      for (std::size_t apex = seed; apex <= front; ++apex) {
        const double rf = compute_rf(apex, seed, front);
        CHECK(rf >= 0.0);
        CHECK(rf <= 1.0);
        CHECK(rf > prev);
        prev = rf;
      }
    }
  }
}

TEST_CASE("analyze_run normalizes percentages") {
  // Two triangles with raw areas 3 and 1, sharing the endpoint at index 4.
  const auto c = Chromatogram({0, 1.5, 1.5, 0, 0, 0.5, 0.5, 0, 0}, 0, 8);
  REQUIRE(integrate_peak(c, {0, 3}, BaselineMode::Raw) == 3.0);
  const std::vector<PeakClick> clicks{click(0, 3), click(4, 7)};
  const auto peaks = analyze_run(c, clicks, BaselineMode::Raw);
  REQUIRE(peaks.size() == 2);
  CHECK(peaks[0].number == 1);
  CHECK(peaks[1].number == 2);
  CHECK(peaks[0].area == 3.0);
  CHECK(peaks[1].area == 1.0);
  CHECK(peaks[0].percent == doctest::Approx(75.0));
  CHECK(peaks[1].percent == doctest::Approx(25.0));
  CHECK(peaks[0].apex_idx == 1);
  CHECK(peaks[1].apex_idx == 5);
  CHECK(peaks[1].rf == doctest::Approx(5.0 / 8.0));

  const auto single = analyze_run(c, std::vector<PeakClick>{click(3.6, 0.2)}, BaselineMode::Raw);
  REQUIRE(single.size() == 1);
  CHECK(single[0].percent == 100.0);
  CHECK(single[0].bounds == PeakBounds{0, 4});
}

TEST_CASE("analyze_run keeps input order and allows shared endpoints") {
  const auto c = chrom_of({0, 5, 0, 9, 0, 2, 0});
  const std::vector<PeakClick> clicks{click(4, 6), click(0, 2), click(2, 4)};
  const auto peaks = analyze_run(c, clicks, BaselineMode::Raw);
  CHECK(peaks[0].bounds == PeakBounds{4, 6});
  CHECK(peaks[1].bounds == PeakBounds{0, 2});
  CHECK(peaks[2].bounds == PeakBounds{2, 4});
  CHECK(peaks[2].apex_idx == 3);
}

TEST_CASE("analyze_run error paths") {
  const auto c = chrom_of({0, 5, 0, 9, 0, 2, 0});
  CHECK(error_of([&] { analyze_run(c, {}, BaselineMode::Raw); }) == ErrorCode::EmptyPeakSet);
  CHECK(error_of([&] { analyze_run(c, std::vector{click(0, 4), click(3, 6)}, BaselineMode::Raw); }) ==
        ErrorCode::OverlappingPeaks);
  CHECK(error_of([&] { analyze_run(c, std::vector{click(0, 6), click(2, 3)}, BaselineMode::Raw); }) ==
        ErrorCode::OverlappingPeaks);
  CHECK(error_of([&] { analyze_run(c, std::vector{click(2.2, 1.8)}, BaselineMode::Raw); }) ==
        ErrorCode::InvalidBounds);
  const auto zero = chrom_of({0, 0, 0, 0});
  CHECK(error_of([&] { analyze_run(zero, std::vector{click(0, 3)}, BaselineMode::Raw); }) ==
        ErrorCode::ZeroTotalArea);
  const auto flat = chrom_of({4, 4, 4, 4});
  CHECK(error_of([&] { analyze_run(flat, std::vector{click(0, 3)}, BaselineMode::LinearChord); }) ==
        ErrorCode::ZeroTotalArea);

  try {
    analyze_run(c, std::vector{click(0, 4), click(3, 6)}, BaselineMode::Raw);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("overlap") != std::string::npos);
  }
}

TEST_CASE("scale equivariance and percent normalization over random runs") {
  std::mt19937 rng(47);
  std::uniform_real_distribution<double> v(0.0, 100.0);
  std::uniform_real_distribution<double> scale(0.05, 2.5);
  std::uniform_int_distribution<int> npeaks(1, 5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = npeaks(rng);
    const std::size_t len = static_cast<std::size_t>(n) * 10 + 5;
    std::vector<double> sig(len);
    for (auto& s : sig) s = v(rng);
    std::vector<PeakClick> clicks;
    for (int k = 0; k < n; ++k) clicks.push_back(click(10.0 * k + 1, 10.0 * k + 9.4));
    const double c = scale(rng);
    std::vector<double> scaled(sig);
    for (auto& s : scaled) s *= c;

    for (auto mode : {BaselineMode::Raw, BaselineMode::LinearChord}) {
      const Chromatogram base(sig, 2, len - 3);
      const Chromatogram big(scaled, 2, len - 3);
      std::vector<PeakResult> a;
      try {
        a = analyze_run(base, clicks, mode);
      } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ZeroTotalArea);
        continue;
      }
      const auto b = analyze_run(big, clicks, mode);
      double total = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        total += a[k].percent;
        CHECK(b[k].area == doctest::Approx(c * a[k].area).epsilon(1e-10));
        CHECK(b[k].percent == doctest::Approx(a[k].percent).epsilon(1e-10));
        CHECK(b[k].apex_idx == a[k].apex_idx);
        CHECK(b[k].rf == a[k].rf);
        CHECK(a[k].area >= 0.0);
        CHECK(a[k].bounds.start_idx <= a[k].apex_idx);
        CHECK(a[k].apex_idx <= a[k].bounds.end_idx);
      }
      CHECK(std::abs(total - 100.0) <= 1e-9);
    }
  }
}

TEST_CASE("baseline names") {
  CHECK(to_string(BaselineMode::Raw) == "raw");
  CHECK(to_string(BaselineMode::LinearChord) == "linear");
  CHECK(parse_baseline("linear") == BaselineMode::LinearChord);
  CHECK_THROWS_AS(parse_baseline("chord"), Error);
}
