#pragma once

#include <cstdint>
#include <vector>

#include "json.hpp"
#include "lanescan/image.hpp"

namespace lanescan {

/// Gaussian spot along the migration axis, uniform across the lane width.
struct SpotSpec {
  double center_rf = 0.0;  // [0, 1]
  double amplitude = 0.0;  // (0, 255], darkening at the spot center
  double sigma = 1.0;      // pixels
};

/// Lane occupying columns [x0, x1).
struct LaneSpec {
  int x0 = 0;
  int x1 = 0;
  int seed_row = 0;
  int front_row = 0;
  std::vector<SpotSpec> spots;
};

struct PlateSpec {
  int width = 0;
  int height = 0;
  std::vector<LaneSpec> lanes;
  int background_gray = 255;
  double noise_sigma = 0.0;
};

struct SpotTruth {
  SpotSpec spot;
  double expected_rf = 0.0;
  double expected_fraction = 0.0;
};

struct GroundTruth {
  std::vector<std::vector<SpotTruth>> lanes;
};

struct SyntheticPlate {
  RgbImage image;
  GroundTruth truth;
};

/// Row of a spot center: seed_row - center_rf * (seed_row - front_row).
double spot_row(const LaneSpec& lane, const SpotSpec& spot) noexcept;

/// Throws Error(SpecOutOfBounds) naming the offending field.
void validate(const PlateSpec& spec);

/// Renders the plate. Identical (spec, seed) pairs give identical images.
SyntheticPlate generate_plate(const PlateSpec& spec, std::uint64_t rng_seed);

/// Throws Error(SchemaViolation) for malformed JSON and
/// Error(SpecOutOfBounds) for a well-formed but invalid spec.
PlateSpec plate_spec_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PlateSpec& spec);

/// Ground-truth manifest: lanes -> spots -> {center_rf, amplitude, sigma,
/// expected_fraction}.
nlohmann::json manifest_json(const PlateSpec& spec, const GroundTruth& truth, std::uint64_t rng_seed);

}  // namespace lanescan
