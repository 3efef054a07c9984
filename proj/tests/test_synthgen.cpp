#include <cmath>
#include <sstream>

#include "cod2m/error.hpp"
#include "cod2m/synthgen.hpp"
#include "doctest.h"

using namespace cod2m;
using namespace cod2m::synthgen;

namespace {

const std::array<SensorModel, kSensorCount>& sensors() {
  static const auto models = default_sensor_models();
  return models;
}

Condition dry_morning() { return {1, 0.9, 0.2, TimeOfDay::Morning}; }

std::string text_of(const Dataset& d) {
  std::ostringstream out;
  write_dataset(d, out);
  return out.str();
}

}  // namespace

TEST_SUITE("synthgen") {
  TEST_CASE("default terrain is valid and has a 14 x 23 scan grid") {
    const auto t = default_terrain();
    CHECK_NOTHROW(validate(t));
    CHECK(t.ied_positions.size() == 3);
    int count = 0;
    for (double y = 0.0; y <= 1100.0; y += 50.0) {
      for (double x = 0.0; x <= 670.0; x += 50.0) ++count;
    }
    CHECK(count == 322);
    const auto grid = grid_positions(t);
    CHECK(grid.size() == 322);
    CHECK(grid[1].x == 50.0);
    CHECK(grid[14].y == 50.0);
  }

  TEST_CASE("acquisition on an IED is labelled and lights up channel 0") {
    const auto t = default_terrain();
    Rng rng(1);
    const auto s = acquire_sample(t, sensors(), {550.0, 250.0}, dry_morning(), 90.0, rng);
    CHECK(s.label);
    CHECK(base_response(sensors()[0], distance_to_nearest_ied(t, {550.0, 250.0}), dry_morning(), t.ied_radius)[0] >= 0.9);

    const auto far = acquire_sample(t, sensors(), {0.0, 0.0}, dry_morning(), 90.0, rng);
    CHECK_FALSE(far.label);
  }

  TEST_CASE("acquisition is deterministic in its RNG") {
    const auto t = default_terrain();
    Rng a(5), b(5);
    CHECK(acquire_sample(t, sensors(), {300.0, 600.0}, dry_morning(), 45.0, a) ==
          acquire_sample(t, sensors(), {300.0, 600.0}, dry_morning(), 45.0, b));
  }

  TEST_CASE("labels depend only on position, not on the servo angle") {
    const auto t = default_terrain();
    Rng rng(2);
    for (const auto& p : grid_positions(t)) {
      const bool truth = distance_to_nearest_ied(t, p) <= t.ied_radius;
      for (double angle : {0.0, 45.0, 90.0, 180.0}) {
        CHECK(acquire_sample(t, sensors(), p, dry_morning(), angle, rng).label == truth);
      }
    }
  }

  TEST_CASE("invalid acquisitions and configs are rejected") {
    const auto t = default_terrain();
    Rng rng(3);
    CHECK_THROWS_AS(acquire_sample(t, sensors(), {-1.0, 0.0}, dry_morning(), 90.0, rng), ValidationError);
    CHECK_THROWS_AS(acquire_sample(t, sensors(), {0.0, 0.0}, dry_morning(), 181.0, rng), ValidationError);
    auto cfg = default_gen_config();
    cfg.samples_per_day = 323;
    CHECK_THROWS_AS(generate_dataset(cfg), ValidationError);
    cfg = default_gen_config();
    cfg.sensor_models[1].noise_sigma = -0.1;
    CHECK_THROWS_AS(generate_dataset(cfg), ValidationError);
    cfg = default_gen_config();
    cfg.terrain.ied_positions.push_back({700.0, 10.0});
    CHECK_THROWS_AS(generate_dataset(cfg), ValidationError);
  }

  TEST_CASE("the default campaign: 100 positions per day revisited on day 2") {
    const auto d = generate_dataset(default_gen_config());
    REQUIRE(d.size() == 200);
    for (std::size_t i = 0; i < 100; ++i) {
      const auto& a = d.samples()[i];
      const auto& b = d.samples()[i + 100];
      CHECK(a.id == static_cast<std::int64_t>(i));
      CHECK(a.condition.day == 1);
      CHECK(b.condition.day == 2);
      CHECK(a.position == b.position);
      CHECK(a.label == b.label);
    }
    for (std::size_t i = 0; i < 100; ++i) {
      for (std::size_t j = i + 1; j < 100; ++j) CHECK_FALSE(d.samples()[i].position == d.samples()[j].position);
    }
  }

  TEST_CASE("generation is byte-stable for a seed and varies across seeds") {
    auto cfg = default_gen_config();
    const auto first = text_of(generate_dataset(cfg));
    CHECK(text_of(generate_dataset(cfg)) == first);
    cfg.seed = 43;
    CHECK(text_of(generate_dataset(cfg)) != first);
  }

  TEST_CASE("positive fraction matches the area ratio of the grid") {
    const auto t = default_terrain();
    int inside = 0;
    for (int j = 0; j <= 22; ++j) {
      for (int i = 0; i <= 13; ++i) {
        bool hit = false;
        for (const auto& ied : t.ied_positions) {
          const double dx = 50.0 * i - ied.x, dy = 50.0 * j - ied.y;
          hit = hit || dx * dx + dy * dy <= 75.0 * 75.0;
        }
        inside += hit ? 1 : 0;
      }
    }
    const double expected = inside / 322.0;
    auto cfg = default_gen_config();
    std::size_t positives = 0, total = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      cfg.seed = seed;
      const auto d = generate_dataset(cfg);
      for (const auto& s : d.samples()) {
        if (s.condition.day != 1) continue;
        positives += s.label ? 1 : 0;
        ++total;
      }
    }
    CHECK(std::abs(static_cast<double>(positives) / static_cast<double>(total) - expected) < 0.02);
  }

  TEST_CASE("day 2 is noisier than day 1 for every sensor") {
    const auto cfg = default_gen_config();
    for (const auto& m : cfg.sensor_models) {
      CHECK(effective_sigma(m, cfg.day_conditions[1]) > effective_sigma(m, cfg.day_conditions[0]));
    }
    auto big = cfg;
    big.samples_per_day = 300;
    const auto d = generate_dataset(big);
    for (const auto& m : cfg.sensor_models) {
      double sq[2] = {0.0, 0.0};
      double n[2] = {0.0, 0.0};
      for (const auto& s : d.samples()) {
        const auto day = static_cast<std::size_t>(s.condition.day - 1);
        const auto sensed = distance_to_nearest_ied(big.terrain, aimed_point(big.terrain, s.position, 90.0));
        const auto base = base_response(m, sensed, s.condition, big.terrain.ied_radius);
        const double r = s.feature(m.kind)[2] - base[2];
        sq[day] += r * r;
        n[day] += 1.0;
      }
      CHECK(sq[1] / n[1] > sq[0] / n[0]);
    }
  }

  TEST_CASE("all features lie in [0,1]") {
    auto cfg = default_gen_config();
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      cfg.seed = seed;
      const auto d = generate_dataset(cfg);
      for (const auto& s : d.samples()) {
        for (const auto& f : s.features) {
          CHECK(f.size() == kFeatureDims);
          for (double v : f) CHECK((v >= 0.0 && v <= 1.0));
        }
      }
    }
  }
}
