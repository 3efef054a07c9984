#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cod2m/dataset.hpp"
#include "cod2m/rng.hpp"

namespace cod2m::synthgen {

struct Terrain {
  double width = 670.0;      // mm
  double height = 1100.0;    // mm
  double scan_step = 50.0;   // mm
  std::vector<Position> ied_positions;
  double ied_radius = 75.0;  // mm

  bool operator==(const Terrain&) const = default;
};

void validate(const Terrain& terrain);

/// The campaign terrain: 670x1100 mm, 50 mm step, three mock IEDs.
Terrain default_terrain();

/// Scan grid points in row-major order (y outer, x inner), spacing scan_step from the origin.
std::vector<Position> grid_positions(const Terrain& terrain);

double distance_to_nearest_ied(const Terrain& terrain, Position p);

/// Simulated response of one sensor.
///
/// Channel 0 is a Gaussian proximity kernel with standard deviation
/// ied_radius/2. Channels 1..3 are fixed per-sensor transforms of channel 0
/// plus a condition bias. Noise scale grows with humidity and with the
/// illumination deficit, weighted by the two sensitivities.
struct SensorModel {
  SensorKind kind = SensorKind::VS;
  double noise_sigma = 0.05;
  double illumination_sensitivity = 0.0;  // [0,1]
  double humidity_sensitivity = 0.0;      // [0,1]

  bool operator==(const SensorModel&) const = default;
};

void validate(const SensorModel& model);

inline constexpr std::size_t kFeatureDims = 4;

/// Noise-free features at the given distance from the nearest IED.
FeatureVector base_response(const SensorModel& model, double distance, const Condition& cond, double ied_radius);

/// Noise standard deviation under a condition.
double effective_sigma(const SensorModel& model, const Condition& cond);

std::array<SensorModel, kSensorCount> default_sensor_models();

struct GenConfig {
  Terrain terrain = default_terrain();
  int samples_per_day = 100;
  std::array<Condition, 2> day_conditions{};
  std::array<SensorModel, kSensorCount> sensor_models{};
  std::uint64_t seed = 42;

  bool operator==(const GenConfig&) const = default;
};

/// Dry morning on day 1, drizzly afternoon on day 2, default sensors, 100 samples per day.
GenConfig default_gen_config();

void validate(const GenConfig& config);

/// One acquisition at `position`, with the servo aimed at `angle_deg`.
/// The aim moves the sensing point by cos(angle)·scan_step/2 along x; the
/// label depends only on `position`.
Sample acquire_sample(const Terrain& terrain, const std::array<SensorModel, kSensorCount>& sensors,
                      Position position, const Condition& cond, double angle_deg, Rng& rng,
                      std::int64_t id = 0);

/// Sensing point for a servo angle.
Position aimed_point(const Terrain& terrain, Position position, double angle_deg);

/// samples_per_day grid positions drawn without replacement, each acquired
/// once per day. Day-1 samples come first (ids 0..n-1), then day 2 in the same
/// position order (ids n..2n-1).
Dataset generate_dataset(const GenConfig& config);

}  // namespace cod2m::synthgen
