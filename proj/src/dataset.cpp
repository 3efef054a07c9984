#include "cod2m/dataset.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "cod2m/error.hpp"
#include "cod2m/text.hpp"

namespace cod2m {

namespace {

constexpr std::string_view kMagic = "cod2m-dataset v1";

std::string sample_tag(std::int64_t id) { return "sample " + std::to_string(id); }

void check_unit(double v, const std::string& what) {
  if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
    throw ValidationError(what + " must be in [0,1], got " + text::format_real(v));
  }
}

}  // namespace

std::string_view to_string(SensorKind kind) {
  switch (kind) {
    case SensorKind::VS: return "VS";
    case SensorKind::IR: return "IR";
    case SensorKind::UV: return "UV";
    case SensorKind::TM: return "TM";
    case SensorKind::GP: return "GP";
  }
  return "?";
}

std::optional<SensorKind> parse_sensor(std::string_view name) {
  for (const auto kind : kAllSensors) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

std::string_view to_string(TimeOfDay t) { return t == TimeOfDay::Morning ? "morning" : "afternoon"; }

std::optional<TimeOfDay> parse_time_of_day(std::string_view name) {
  if (name == "morning") return TimeOfDay::Morning;
  if (name == "afternoon") return TimeOfDay::Afternoon;
  return std::nullopt;
}

std::string_view to_string(SplitKind kind) {
  switch (kind) {
    case SplitKind::C1: return "C1";
    case SplitKind::C2: return "C2";
    case SplitKind::C3: return "C3";
  }
  return "?";
}

std::optional<SplitKind> parse_split_kind(std::string_view name) {
  if (name == "C1") return SplitKind::C1;
  if (name == "C2") return SplitKind::C2;
  if (name == "C3") return SplitKind::C3;
  return std::nullopt;
}

void validate(const Condition& c) {
  if (c.day != 1 && c.day != 2) {
    throw ValidationError("condition day must be 1 or 2, got " + std::to_string(c.day));
  }
  check_unit(c.illumination, "illumination");
  check_unit(c.humidity, "humidity");
}

Dataset::Dataset(DatasetHeader header, std::vector<Sample> samples)
    : header_(std::move(header)), samples_(std::move(samples)) {
  if (!(header_.terrain_width > 0.0) || !(header_.terrain_height > 0.0) ||
      !std::isfinite(header_.terrain_width) || !std::isfinite(header_.terrain_height)) {
    throw ValidationError("terrain bounds must be positive");
  }
  for (const auto d : header_.dims) {
    if (d == 0) throw ValidationError("feature dimensions must be positive");
  }
  if (header_.note.find_first_of("\r\n") != std::string::npos) {
    throw ValidationError("dataset note must be a single line");
  }

  std::unordered_set<std::int64_t> ids;
  bool has_ied = false;
  bool has_clear = false;
  for (const auto& s : samples_) {
    const auto tag = sample_tag(s.id);
    if (!ids.insert(s.id).second) throw ValidationError("duplicate id in " + tag);
    try {
      validate(s.condition);
    } catch (const ValidationError& e) {
      throw ValidationError(tag + ": " + e.what());
    }
    if (!(s.position.x >= 0.0 && s.position.x <= header_.terrain_width && s.position.y >= 0.0 &&
          s.position.y <= header_.terrain_height)) {
      throw ValidationError(tag + ": position outside terrain bounds");
    }
    for (const auto kind : kAllSensors) {
      const auto& fv = s.feature(kind);
      if (fv.size() != header_.dims[index_of(kind)]) {
        throw ValidationError(tag + ": " + std::string(to_string(kind)) + " vector has length " +
                              std::to_string(fv.size()) + ", header declares " +
                              std::to_string(header_.dims[index_of(kind)]));
      }
      for (const double v : fv) check_unit(v, tag + " " + std::string(to_string(kind)) + " feature");
    }
    (s.label ? has_ied : has_clear) = true;
  }
  if (!has_ied || !has_clear) {
    throw ValidationError(std::string("dataset must contain IED and non-IED samples; missing ") +
                          (has_ied ? "non-IED" : "IED") + " samples");
  }
}

void write_dataset(const Dataset& dataset, std::ostream& out) {
  const auto& h = dataset.header();
  out << kMagic << '\n' << "dims";
  for (const auto kind : kAllSensors) out << ' ' << to_string(kind) << '=' << h.dims[index_of(kind)];
  out << " terrain=" << text::format_real(h.terrain_width) << 'x' << text::format_real(h.terrain_height)
      << '\n';
  if (!h.note.empty()) out << "# " << h.note << '\n';

  for (const auto& s : dataset.samples()) {
    out << s.id << ',' << s.condition.day << ',' << to_string(s.condition.time_of_day) << ','
        << text::format_real(s.condition.illumination) << ',' << text::format_real(s.condition.humidity)
        << ',' << text::format_real(s.position.x) << ',' << text::format_real(s.position.y) << ','
        << (s.label ? 1 : 0);
    for (const auto kind : kAllSensors) {
      out << ',' << to_string(kind) << ':';
      const auto& fv = s.feature(kind);
      for (std::size_t i = 0; i < fv.size(); ++i) {
        if (i) out << ';';
        out << text::format_real(fv[i]);
      }
    }
    out << '\n';
  }
}

namespace {

DatasetHeader parse_header_line(std::string_view line) {
  const auto parts = text::split(text::trim(line), ' ');
  if (parts.size() != 1 + kSensorCount + 1 || parts[0] != "dims") {
    throw ParseError("line 2: expected 'dims VS=<n> IR=<n> UV=<n> TM=<n> GP=<n> terrain=<w>x<h>'");
  }
  DatasetHeader h;
  for (std::size_t i = 0; i < kSensorCount; ++i) {
    const auto kv = text::split(parts[1 + i], '=');
    const auto expected = to_string(kAllSensors[i]);
    if (kv.size() != 2 || kv[0] != expected) {
      throw ParseError("line 2: expected field " + std::string(expected) + "=<n>, got '" +
                       std::string(parts[1 + i]) + "'");
    }
    const auto n = text::parse_int(kv[1], "dimension of " + std::string(expected));
    if (n <= 0) throw ParseError("line 2: dimension of " + std::string(expected) + " must be positive");
    h.dims[i] = static_cast<std::size_t>(n);
  }
  const auto terrain = text::split(parts.back(), '=');
  if (terrain.size() != 2 || terrain[0] != "terrain") throw ParseError("line 2: expected terrain=<w>x<h>");
  const auto wh = text::split(terrain[1], 'x');
  if (wh.size() != 2) throw ParseError("line 2: expected terrain=<w>x<h>");
  h.terrain_width = text::parse_real(wh[0], "terrain width");
  h.terrain_height = text::parse_real(wh[1], "terrain height");
  return h;
}

Sample parse_record(std::string_view line, std::size_t line_no) {
  const auto where = "line " + std::to_string(line_no) + ": ";
  const auto fields = text::split(line, ',');
  constexpr std::size_t kFixed = 8;
  if (fields.size() != kFixed + kSensorCount) {
    throw ParseError(where + "expected " + std::to_string(kFixed + kSensorCount) + " fields, got " +
                     std::to_string(fields.size()));
  }
  Sample s;
  try {
    s.id = text::parse_int(fields[0], "id");
    const auto day = text::parse_int(fields[1], "day");
    s.condition.day = static_cast<int>(day);
    const auto tod = parse_time_of_day(text::trim(fields[2]));
    if (!tod) throw ParseError("unknown time_of_day '" + std::string(fields[2]) + "'");
    s.condition.time_of_day = *tod;
    s.condition.illumination = text::parse_real(fields[3], "illumination");
    s.condition.humidity = text::parse_real(fields[4], "humidity");
    s.position.x = text::parse_real(fields[5], "x");
    s.position.y = text::parse_real(fields[6], "y");
    const auto label = text::trim(fields[7]);
    if (label != "0" && label != "1") throw ParseError("label must be 0 or 1, got '" + std::string(label) + "'");
    s.label = label == "1";
    for (std::size_t i = 0; i < kSensorCount; ++i) {
      const auto field = fields[kFixed + i];
      const auto colon = field.find(':');
      const auto expected = to_string(kAllSensors[i]);
      if (colon == std::string_view::npos || text::trim(field.substr(0, colon)) != expected) {
        throw ParseError("expected field " + std::string(expected) + ":<values>, got '" + std::string(field) + "'");
      }
      auto& fv = s.features[i];
      for (const auto v : text::split(field.substr(colon + 1), ';')) {
        fv.push_back(text::parse_real(v, std::string(expected) + " feature"));
      }
    }
  } catch (const ParseError& e) {
    throw ParseError(where + e.what());
  }
  return s;
}

}  // namespace

Dataset read_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || text::trim(line) != kMagic) {
    throw ParseError("line 1: expected '" + std::string(kMagic) + "'");
  }
  if (!std::getline(in, line)) throw ParseError("line 2: missing dims header");
  auto header = parse_header_line(line);

  std::vector<Sample> samples;
  std::size_t line_no = 2;
  bool in_preamble = true;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = text::trim(line);
    if (trimmed.empty()) continue;
    if (trimmed.front() == '#') {
      if (!in_preamble) throw ParseError("line " + std::to_string(line_no) + ": comment after records");
      if (!header.note.empty()) throw ParseError("line " + std::to_string(line_no) + ": more than one note line");
      header.note = std::string(text::trim(trimmed.substr(1)));
      continue;
    }
    in_preamble = false;
    samples.push_back(parse_record(line, line_no));
  }
  return Dataset(std::move(header), std::move(samples));
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset " + path.string());
  try {
    return read_dataset(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_dataset(dataset, out);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

namespace {

void require_classes(const std::vector<Sample>& samples, std::string_view set_name, std::string_view case_name) {
  bool ied = false;
  bool clear = false;
  for (const auto& s : samples) (s.label ? ied : clear) = true;
  if (!ied || !clear) {
    throw ValidationError(std::string(case_name) + " " + std::string(set_name) + " set lacks " +
                          (ied ? "non-IED" : "IED") + " samples");
  }
}

}  // namespace

Split split(const Dataset& dataset, const SplitCase& split_case) {
  std::vector<Sample> train;
  std::vector<Sample> validation;
  const auto name = to_string(split_case.kind);

  if (split_case.kind == SplitKind::C3) {
    if (!std::isfinite(split_case.region_boundary)) throw ValidationError("C3 boundary must be finite");
    for (const auto& s : dataset.samples()) {
      (s.position.y < split_case.region_boundary ? train : validation).push_back(s);
    }
  } else {
    const int train_day = split_case.kind == SplitKind::C1 ? 1 : 2;
    bool day_seen[2] = {false, false};
    for (const auto& s : dataset.samples()) {
      day_seen[s.condition.day - 1] = true;
      (s.condition.day == train_day ? train : validation).push_back(s);
    }
    for (int d = 0; d < 2; ++d) {
      if (!day_seen[d]) {
        throw ValidationError(std::string(name) + " requires day " + std::to_string(d + 1) + " samples");
      }
    }
  }
  require_classes(train, "training", name);
  require_classes(validation, "validation", name);
  return Split{Dataset(dataset.header(), std::move(train)), Dataset(dataset.header(), std::move(validation))};
}

}  // namespace cod2m
