#include "lanescan/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "json_fields.hpp"
#include "lanescan/error.hpp"

namespace lanescan {

namespace {

[[noreturn]] void out_of_bounds(const std::string& field, const std::string& what) {
  throw Error(ErrorCode::SpecOutOfBounds, field + ": " + what, field);
}

}  // namespace

double spot_row(const LaneSpec& lane, const SpotSpec& spot) noexcept {
  return lane.seed_row - spot.center_rf * (lane.seed_row - lane.front_row);
}

void validate(const PlateSpec& spec) {
  if (spec.width < 1) out_of_bounds("width", "must be at least 1");
  if (spec.height < 2) out_of_bounds("height", "must be at least 2");
  if (spec.background_gray < 0 || spec.background_gray > 255) {
    out_of_bounds("background_gray", "must lie in [0, 255]");
  }
  if (!std::isfinite(spec.noise_sigma) || spec.noise_sigma < 0.0) {
    out_of_bounds("noise_sigma", "must be a finite value >= 0");
  }
  for (std::size_t i = 0; i < spec.lanes.size(); ++i) {
    const LaneSpec& lane = spec.lanes[i];
    const std::string at = "lanes[" + std::to_string(i) + "]";
    if (lane.x0 < 0 || lane.x1 > spec.width || lane.x0 >= lane.x1) {
      out_of_bounds(at + ".x0", "lane columns must satisfy 0 <= x0 < x1 <= width");
    }
    if (lane.front_row < 0 || lane.seed_row >= spec.height) {
      out_of_bounds(at + ".seed_row", "seed and front rows must lie inside the plate");
    }
    if (lane.seed_row <= lane.front_row) {
      out_of_bounds(at + ".seed_row", "seed row must be below the front row");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (lane.x0 < spec.lanes[j].x1 && spec.lanes[j].x0 < lane.x1) {
        out_of_bounds(at + ".x0", "lane overlaps lanes[" + std::to_string(j) + "]");
      }
    }
    for (std::size_t k = 0; k < lane.spots.size(); ++k) {
      const SpotSpec& spot = lane.spots[k];
      const std::string sat = at + ".spots[" + std::to_string(k) + "]";
      if (!(spot.center_rf >= 0.0 && spot.center_rf <= 1.0)) {
        out_of_bounds(sat + ".center_rf", "must lie in [0, 1]");
      }
      if (!(spot.amplitude > 0.0 && spot.amplitude <= 255.0)) {
        out_of_bounds(sat + ".amplitude", "must lie in (0, 255]");
      }
      if (!(spot.sigma > 0.0) || !std::isfinite(spot.sigma)) {
        out_of_bounds(sat + ".sigma", "must be positive");
      }
    }
  }
}

SyntheticPlate generate_plate(const PlateSpec& spec, std::uint64_t rng_seed) {
  validate(spec);

  const auto bg = static_cast<std::uint8_t>(spec.background_gray);
  RgbImage image(spec.width, spec.height, Rgb{bg, bg, bg});
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> noise(0.0, 1.0);

  GroundTruth truth;
  for (const LaneSpec& lane : spec.lanes) {
    // Darkening depends only on the row, so compute one profile per lane.
    std::vector<double> darkening(static_cast<std::size_t>(spec.height), 0.0);
    for (int row = 0; row < spec.height; ++row) {
      for (const SpotSpec& spot : lane.spots) {
        const double d = row - spot_row(lane, spot);
        darkening[static_cast<std::size_t>(row)] +=
            spot.amplitude * std::exp(-(d * d) / (2.0 * spot.sigma * spot.sigma));
      }
    }
    for (int row = 0; row < spec.height; ++row) {
      for (int x = lane.x0; x < lane.x1; ++x) {
        double v = spec.background_gray - darkening[static_cast<std::size_t>(row)];
        if (spec.noise_sigma > 0.0) v += spec.noise_sigma * noise(rng);
        const auto g = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
        image.at(x, row) = Rgb{g, g, g};
      }
    }

    double total = 0.0;
    for (const SpotSpec& spot : lane.spots) total += spot.amplitude * spot.sigma;
    std::vector<SpotTruth> spots;
    for (const SpotSpec& spot : lane.spots) {
      spots.push_back({spot, spot.center_rf, spot.amplitude * spot.sigma / total});
    }
    truth.lanes.push_back(std::move(spots));
  }
  return {std::move(image), std::move(truth)};
}

PlateSpec plate_spec_from_json(const nlohmann::json& j) {
  namespace jf = json_fields;
  PlateSpec spec;
  spec.width = jf::integer(j, "width", "");
  spec.height = jf::integer(j, "height", "");
  spec.background_gray = j.contains("background_gray") ? jf::integer(j, "background_gray", "") : 255;
  spec.noise_sigma = j.contains("noise_sigma") ? jf::number(j, "noise_sigma", "") : 0.0;

  const auto& lanes = jf::array(j, "lanes", "");
  for (std::size_t i = 0; i < lanes.size(); ++i) {
    const std::string at = jf::index("lanes", i);
    const auto& l = lanes[i];
    LaneSpec lane;
    lane.x0 = jf::integer(l, "x0", at);
    lane.x1 = jf::integer(l, "x1", at);
    lane.seed_row = jf::integer(l, "seed_row", at);
    lane.front_row = jf::integer(l, "front_row", at);
    const auto& spots = jf::array(l, "spots", at);
    for (std::size_t k = 0; k < spots.size(); ++k) {
      const std::string sat = jf::index(jf::join(at, "spots"), k);
      lane.spots.push_back(SpotSpec{jf::number(spots[k], "center_rf", sat),
                                    jf::number(spots[k], "amplitude", sat),
                                    jf::number(spots[k], "sigma", sat)});
    }
    spec.lanes.push_back(std::move(lane));
  }
  validate(spec);
  return spec;
}

nlohmann::json to_json(const PlateSpec& spec) {
  nlohmann::json lanes = nlohmann::json::array();
  for (const LaneSpec& lane : spec.lanes) {
    nlohmann::json spots = nlohmann::json::array();
    for (const SpotSpec& s : lane.spots) {
      spots.push_back({{"center_rf", s.center_rf}, {"amplitude", s.amplitude}, {"sigma", s.sigma}});
    }
    lanes.push_back({{"x0", lane.x0},
                     {"x1", lane.x1},
                     {"seed_row", lane.seed_row},
                     {"front_row", lane.front_row},
                     {"spots", spots}});
  }
  return {{"width", spec.width},
          {"height", spec.height},
          {"background_gray", spec.background_gray},
          {"noise_sigma", spec.noise_sigma},
          {"lanes", lanes}};
}

nlohmann::json manifest_json(const PlateSpec& spec, const GroundTruth& truth, std::uint64_t rng_seed) {
  nlohmann::json lanes = nlohmann::json::array();
  for (std::size_t i = 0; i < truth.lanes.size(); ++i) {
    const LaneSpec& lane = spec.lanes.at(i);
    nlohmann::json spots = nlohmann::json::array();
    for (const SpotTruth& t : truth.lanes[i]) {
      spots.push_back({{"center_rf", t.spot.center_rf},
                       {"amplitude", t.spot.amplitude},
                       {"sigma", t.spot.sigma},
                       {"expected_fraction", t.expected_fraction}});
    }
    lanes.push_back({{"x0", lane.x0},
                     {"x1", lane.x1},
                     {"seed_row", lane.seed_row},
                     {"front_row", lane.front_row},
                     {"spots", spots}});
  }
  return {{"width", spec.width},
          {"height", spec.height},
          {"background_gray", spec.background_gray},
          {"noise_sigma", spec.noise_sigma},
          {"seed", rng_seed},
          {"lanes", lanes}};
}

}  // namespace lanescan
