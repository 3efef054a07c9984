#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cod2m {

/// The five MAPS sensors, in the canonical order used everywhere a
/// per-sensor tuple appears (feature maps, beta sets, omega tuples).
enum class SensorKind : std::uint8_t { VS = 0, IR = 1, UV = 2, TM = 3, GP = 4 };

inline constexpr std::size_t kSensorCount = 5;
inline constexpr std::array<SensorKind, kSensorCount> kAllSensors{
    SensorKind::VS, SensorKind::IR, SensorKind::UV, SensorKind::TM, SensorKind::GP};

constexpr std::size_t index_of(SensorKind kind) { return static_cast<std::size_t>(kind); }
std::string_view to_string(SensorKind kind);
std::optional<SensorKind> parse_sensor(std::string_view name);

enum class TimeOfDay : std::uint8_t { Morning, Afternoon };
std::string_view to_string(TimeOfDay t);
std::optional<TimeOfDay> parse_time_of_day(std::string_view name);

struct Condition {
  int day = 1;
  double illumination = 1.0;
  double humidity = 0.0;
  TimeOfDay time_of_day = TimeOfDay::Morning;

  bool operator==(const Condition&) const = default;
};

/// Throws ValidationError when day is not 1 or 2 or a level leaves [0,1].
void validate(const Condition& c);

struct Position {
  double x = 0.0;  // mm
  double y = 0.0;  // mm

  bool operator==(const Position&) const = default;
};

using FeatureVector = std::vector<double>;

struct Sample {
  std::int64_t id = 0;
  Position position;
  Condition condition;
  std::array<FeatureVector, kSensorCount> features;
  bool label = false;  // true: IED at or under this position

  const FeatureVector& feature(SensorKind kind) const { return features[index_of(kind)]; }

  bool operator==(const Sample&) const = default;
};

struct DatasetHeader {
  std::array<std::size_t, kSensorCount> dims{4, 4, 4, 4, 4};
  double terrain_width = 670.0;   // mm
  double terrain_height = 1100.0;  // mm
  std::string note;                // single line; stored as a '#' comment line

  bool operator==(const DatasetHeader&) const = default;
};

/// An immutable, validated collection of samples.
///
/// Construction checks every invariant: unique ids, one feature vector per
/// sensor with the header-declared length, features finite and in [0,1],
/// positions inside the terrain, and both classes present.
class Dataset {
 public:
  Dataset(DatasetHeader header, std::vector<Sample> samples);

  const DatasetHeader& header() const { return header_; }
  const std::vector<Sample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }

  bool operator==(const Dataset&) const = default;

 private:
  DatasetHeader header_;
  std::vector<Sample> samples_;
};

Dataset read_dataset(std::istream& in);
void write_dataset(const Dataset& dataset, std::ostream& out);

Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

enum class SplitKind : std::uint8_t { C1, C2, C3 };

struct SplitCase {
  SplitKind kind = SplitKind::C1;
  double region_boundary = 550.0;  // mm along y; C3 only

  bool operator==(const SplitCase&) const = default;
};

std::string_view to_string(SplitKind kind);
std::optional<SplitKind> parse_split_kind(std::string_view name);

struct Split {
  Dataset train;
  Dataset validation;
};

/// C1: day 1 trains, day 2 validates. C2: the reverse.
/// C3: samples with y < region_boundary train (both days), the rest validate.
/// Sample order within each side follows the input order.
Split split(const Dataset& dataset, const SplitCase& split_case);

}  // namespace cod2m
