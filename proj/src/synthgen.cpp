#include "cod2m/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cod2m/error.hpp"

namespace cod2m::synthgen {

namespace {

struct ChannelShape {
  double gamma;       // channel 1: f0^gamma
  double background;  // channel 2: background + contrast * f0
  double contrast;
  double scale;       // channel 3: offset + scale * sqrt(f0)
  double offset;
};

// Per-sensor transforms, indexed by SensorKind.
constexpr std::array<ChannelShape, kSensorCount> kShapes{{
    {2.0, 0.30, 0.50, 0.60, 0.20},  // VS
    {1.5, 0.20, 0.60, 0.70, 0.10},  // IR
    {2.5, 0.35, 0.45, 0.55, 0.25},  // UV
    {1.2, 0.25, 0.55, 0.65, 0.15},  // TM
    {0.8, 0.15, 0.70, 0.75, 0.05},  // GP
}};

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

bool unit(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

}  // namespace

void validate(const Terrain& t) {
  if (!(t.width > 0.0 && t.height > 0.0)) throw ValidationError("terrain size must be positive");
  if (!(t.scan_step > 0.0 && t.scan_step <= std::min(t.width, t.height))) {
    throw ValidationError("scan_step must be positive and fit inside the terrain");
  }
  if (!(t.ied_radius > 0.0)) throw ValidationError("ied_radius must be positive");
  for (const auto& p : t.ied_positions) {
    if (!(p.x >= 0.0 && p.x <= t.width && p.y >= 0.0 && p.y <= t.height)) {
      throw ValidationError("IED position outside terrain");
    }
  }
}

Terrain default_terrain() {
  Terrain t;
  t.ied_positions = {{550.0, 250.0}, {350.0, 600.0}, {500.0, 850.0}};
  return t;
}

std::vector<Position> grid_positions(const Terrain& t) {
  const auto nx = static_cast<int>(std::floor(t.width / t.scan_step + 1e-9)) + 1;
  const auto ny = static_cast<int>(std::floor(t.height / t.scan_step + 1e-9)) + 1;
  std::vector<Position> grid;
  grid.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) grid.push_back({i * t.scan_step, j * t.scan_step});
  }
  return grid;
}

double distance_to_nearest_ied(const Terrain& t, Position p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& ied : t.ied_positions) best = std::min(best, std::hypot(p.x - ied.x, p.y - ied.y));
  return best;
}

void validate(const SensorModel& m) {
  if (!(m.noise_sigma >= 0.0) || !std::isfinite(m.noise_sigma)) {
    throw ValidationError("noise_sigma must be >= 0 for " + std::string(to_string(m.kind)));
  }
  if (!unit(m.illumination_sensitivity) || !unit(m.humidity_sensitivity)) {
    throw ValidationError("condition sensitivities must be in [0,1] for " + std::string(to_string(m.kind)));
  }
}

FeatureVector base_response(const SensorModel& m, double distance, const Condition& cond, double ied_radius) {
  const double s = ied_radius / 2.0;
  const double f0 = std::isfinite(distance) ? std::exp(-(distance * distance) / (2.0 * s * s)) : 0.0;
  const auto& shape = kShapes[index_of(m.kind)];
  // Wet ground brightens the secondary channels; low light darkens them.
  const double bias = 0.15 * m.humidity_sensitivity * cond.humidity -
                      0.30 * m.illumination_sensitivity * (1.0 - cond.illumination);
  return {
      f0,
      clamp01(std::pow(f0, shape.gamma) + bias),
      clamp01(shape.background + shape.contrast * f0 + bias),
      clamp01(shape.offset + shape.scale * std::sqrt(f0) + bias),
  };
}

double effective_sigma(const SensorModel& m, const Condition& cond) {
  return m.noise_sigma *
         (1.0 + m.humidity_sensitivity * cond.humidity + m.illumination_sensitivity * (1.0 - cond.illumination));
}

std::array<SensorModel, kSensorCount> default_sensor_models() {
  return {{
      {SensorKind::VS, 0.24, 0.9, 0.8},
      {SensorKind::IR, 0.24, 0.3, 0.5},
      {SensorKind::UV, 0.30, 0.8, 0.6},
      {SensorKind::TM, 0.30, 0.0, 0.7},
      {SensorKind::GP, 0.18, 0.0, 0.4},
  }};
}

GenConfig default_gen_config() {
  GenConfig c;
  c.day_conditions = {Condition{1, 0.9, 0.2, TimeOfDay::Morning}, Condition{2, 0.5, 0.9, TimeOfDay::Afternoon}};
  c.sensor_models = default_sensor_models();
  return c;
}

void validate(const GenConfig& c) {
  validate(c.terrain);
  if (c.samples_per_day <= 0) throw ValidationError("samples_per_day must be positive");
  for (std::size_t d = 0; d < 2; ++d) {
    validate(c.day_conditions[d]);
    if (c.day_conditions[d].day != static_cast<int>(d) + 1) {
      throw ValidationError("day_conditions[" + std::to_string(d) + "] must describe day " + std::to_string(d + 1));
    }
  }
  for (std::size_t i = 0; i < kSensorCount; ++i) {
    validate(c.sensor_models[i]);
    if (c.sensor_models[i].kind != kAllSensors[i]) {
      throw ValidationError("sensor_models must list VS, IR, UV, TM, GP once each, in that order");
    }
  }
}

Position aimed_point(const Terrain& terrain, Position position, double angle_deg) {
  const double shift = std::cos(angle_deg * std::numbers::pi / 180.0) * terrain.scan_step / 2.0;
  return {position.x + shift, position.y};
}

Sample acquire_sample(const Terrain& terrain, const std::array<SensorModel, kSensorCount>& sensors,
                      Position position, const Condition& cond, double angle_deg, Rng& rng, std::int64_t id) {
  if (!(position.x >= 0.0 && position.x <= terrain.width && position.y >= 0.0 && position.y <= terrain.height)) {
    throw ValidationError("acquisition position outside terrain");
  }
  if (!(angle_deg >= 0.0 && angle_deg <= 180.0)) throw ValidationError("servo angle must be in [0,180]");

  Sample s;
  s.id = id;
  s.position = position;
  s.condition = cond;
  s.label = distance_to_nearest_ied(terrain, position) <= terrain.ied_radius;

  const double sensed_distance = distance_to_nearest_ied(terrain, aimed_point(terrain, position, angle_deg));
  for (const auto& model : sensors) {
    auto fv = base_response(model, sensed_distance, cond, terrain.ied_radius);
    const double sigma = effective_sigma(model, cond);
    for (auto& v : fv) v = clamp01(v + rng.normal(0.0, sigma));
    s.features[index_of(model.kind)] = std::move(fv);
  }
  return s;
}

Dataset generate_dataset(const GenConfig& config) {
  validate(config);
  auto grid = grid_positions(config.terrain);
  const auto n = static_cast<std::size_t>(config.samples_per_day);
  if (n > grid.size()) {
    throw ValidationError("samples_per_day (" + std::to_string(n) + ") exceeds the " + std::to_string(grid.size()) +
                          " scan grid positions");
  }

  Rng pick(derive_seed(config.seed, tag_hash("positions")));
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = i + pick.below(grid.size() - i);
    std::swap(grid[i], grid[j]);
  }

  std::vector<Sample> samples;
  samples.reserve(2 * n);
  for (int day = 1; day <= 2; ++day) {
    const auto& cond = config.day_conditions[static_cast<std::size_t>(day - 1)];
    for (std::size_t i = 0; i < n; ++i) {
      Rng noise(derive_seed(config.seed, static_cast<std::uint64_t>(day), i));
      const auto id = static_cast<std::int64_t>((day - 1) * n + i);
      samples.push_back(acquire_sample(config.terrain, config.sensor_models, grid[i], cond, 90.0, noise, id));
    }
  }

  DatasetHeader header;
  header.dims.fill(kFeatureDims);
  header.terrain_width = config.terrain.width;
  header.terrain_height = config.terrain.height;
  header.note = "synthetic campaign, seed " + std::to_string(config.seed);
  return Dataset(std::move(header), std::move(samples));
}

}  // namespace cod2m::synthgen
