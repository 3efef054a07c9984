#include "cod2m/study_io.hpp"

#include <algorithm>
#include <initializer_list>
#include <string>

#include "cod2m/error.hpp"
#include "cod2m/serialize.hpp"

namespace cod2m::io {

using nlohmann::json;

namespace {

constexpr const char* kResultsFormat = "cod2m-results v1";
constexpr const char* kAgentsFormat = "cod2m-agents v1";

void require_object(const json& doc, const std::string& what) {
  if (!doc.is_object()) throw ParseError(what + " must be a JSON object");
}

void check_keys(const json& doc, std::initializer_list<const char*> allowed, const std::string& what) {
  require_object(doc, what);
  for (const auto& [key, value] : doc.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; })) {
      throw ParseError("unknown key '" + key + "' in " + what);
    }
  }
}

void require_keys(const json& doc, std::initializer_list<const char*> required, const std::string& what) {
  for (const auto* k : required) {
    if (!doc.contains(k)) throw ParseError(what + " is missing key '" + k + "'");
  }
}

template <typename T>
void read_if(const json& doc, const char* key, T& out) {
  if (doc.contains(key)) out = doc.at(key).get<T>();
}

template <typename F>
auto guarded(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ParseError(what + ": " + e.what());
  }
}

json terrain_json(const synthgen::Terrain& t) {
  json ieds = json::array();
  for (const auto& p : t.ied_positions) ieds.push_back({p.x, p.y});
  return {{"width", t.width},
          {"height", t.height},
          {"scan_step", t.scan_step},
          {"ied_positions", std::move(ieds)},
          {"ied_radius", t.ied_radius}};
}

synthgen::Terrain terrain_from_json(const json& doc) {
  check_keys(doc, {"width", "height", "scan_step", "ied_positions", "ied_radius"}, "terrain");
  auto t = synthgen::default_terrain();
  read_if(doc, "width", t.width);
  read_if(doc, "height", t.height);
  read_if(doc, "scan_step", t.scan_step);
  read_if(doc, "ied_radius", t.ied_radius);
  if (doc.contains("ied_positions")) {
    t.ied_positions.clear();
    for (const auto& p : doc.at("ied_positions")) {
      if (!p.is_array() || p.size() != 2) throw ParseError("IED position must be [x, y]");
      t.ied_positions.push_back({p[0].get<double>(), p[1].get<double>()});
    }
  }
  return t;
}

json condition_json(const Condition& c) {
  return {{"day", c.day},
          {"illumination", c.illumination},
          {"humidity", c.humidity},
          {"time_of_day", std::string(to_string(c.time_of_day))}};
}

Condition condition_from_json(const json& doc) {
  check_keys(doc, {"day", "illumination", "humidity", "time_of_day"}, "day condition");
  require_keys(doc, {"day", "illumination", "humidity", "time_of_day"}, "day condition");
  Condition c;
  c.day = doc.at("day").get<int>();
  c.illumination = doc.at("illumination").get<double>();
  c.humidity = doc.at("humidity").get<double>();
  const auto tod = doc.at("time_of_day").get<std::string>();
  const auto parsed = parse_time_of_day(tod);
  if (!parsed) throw ParseError("unknown time_of_day '" + tod + "'");
  c.time_of_day = *parsed;
  return c;
}

SensorKind sensor_from_json(const json& v) {
  const auto name = v.get<std::string>();
  const auto kind = parse_sensor(name);
  if (!kind) throw ParseError("unknown sensor '" + name + "'");
  return *kind;
}

json metrics_json(const experiment::LevelMetrics& m) {
  json roc = json::array();
  for (const auto& p : m.roc.points) roc.push_back({p.fpr, p.tpr});
  return {{"acc", m.acc}, {"rmse", m.rmse}, {"auc", m.auc}, {"roc", std::move(roc)}};
}

experiment::LevelMetrics metrics_from_json(const json& doc) {
  experiment::LevelMetrics m;
  m.acc = doc.at("acc").get<double>();
  m.rmse = doc.at("rmse").get<double>();
  m.auc = doc.at("auc").get<double>();
  for (const auto& p : doc.at("roc")) m.roc.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  metrics::validate(m.roc);
  return m;
}

json agent_config_json(const experiment::AgentConfig& c) {
  return {{"sensor", std::string(to_string(c.sensor))},
          {"alpha", std::string(to_string(c.alpha))},
          {"beta", std::string(to_string(c.beta))},
          {"omega", std::string(to_string(c.omega))}};
}

experiment::AgentConfig agent_config_from_json(const json& doc) {
  experiment::AgentConfig c;
  c.sensor = sensor_from_json(doc.at("sensor"));
  c.alpha = experiment::parse_alpha(doc.at("alpha").get<std::string>());
  c.beta = experiment::parse_beta(doc.at("beta").get<std::string>());
  c.omega = experiment::parse_omega(doc.at("omega").get<std::string>());
  return c;
}

}  // namespace

json to_json(const synthgen::GenConfig& config) {
  json conditions = json::array();
  for (const auto& c : config.day_conditions) conditions.push_back(condition_json(c));
  json sensors = json::array();
  for (const auto& m : config.sensor_models) {
    sensors.push_back({{"kind", std::string(to_string(m.kind))},
                       {"noise_sigma", m.noise_sigma},
                       {"illumination_sensitivity", m.illumination_sensitivity},
                       {"humidity_sensitivity", m.humidity_sensitivity}});
  }
  return {{"terrain", terrain_json(config.terrain)},
          {"samples_per_day", config.samples_per_day},
          {"day_conditions", std::move(conditions)},
          {"sensor_models", std::move(sensors)},
          {"seed", config.seed}};
}

synthgen::GenConfig gen_config_from_json(const json& doc) {
  return guarded("generator config", [&] {
    const std::initializer_list<const char*> keys{"terrain", "samples_per_day", "day_conditions", "sensor_models", "seed"};
    check_keys(doc, keys, "generator config");
    require_keys(doc, keys, "generator config");
    synthgen::GenConfig cfg;
    cfg.terrain = terrain_from_json(doc.at("terrain"));
    cfg.samples_per_day = doc.at("samples_per_day").get<int>();
    const auto& days = doc.at("day_conditions");
    if (!days.is_array() || days.size() != 2) throw ParseError("day_conditions must list exactly two days");
    for (std::size_t i = 0; i < 2; ++i) cfg.day_conditions[i] = condition_from_json(days[i]);
    const auto& sensors = doc.at("sensor_models");
    if (!sensors.is_array() || sensors.size() != kSensorCount) {
      throw ParseError("sensor_models must list exactly five sensors");
    }
    std::array<bool, kSensorCount> seen{};
    for (const auto& s : sensors) {
      check_keys(s, {"kind", "noise_sigma", "illumination_sensitivity", "humidity_sensitivity"}, "sensor model");
      require_keys(s, {"kind"}, "sensor model");
      synthgen::SensorModel m;
      m.kind = sensor_from_json(s.at("kind"));
      if (seen[index_of(m.kind)]) throw ParseError("sensor " + std::string(to_string(m.kind)) + " listed twice");
      seen[index_of(m.kind)] = true;
      read_if(s, "noise_sigma", m.noise_sigma);
      read_if(s, "illumination_sensitivity", m.illumination_sensitivity);
      read_if(s, "humidity_sensitivity", m.humidity_sensitivity);
      cfg.sensor_models[index_of(m.kind)] = m;
    }
    cfg.seed = doc.at("seed").get<std::uint64_t>();
    synthgen::validate(cfg);
    return cfg;
  });
}

json to_json(const neuroevo::NeatConfig& cfg) {
  json acts = json::array();
  for (const auto a : cfg.hidden_activations) acts.push_back(activation_name(a));
  return {{"population_size", cfg.population_size},
          {"generations", cfg.generations},
          {"weight_mutate_rate", cfg.weight_mutate_rate},
          {"weight_perturb_sigma", cfg.weight_perturb_sigma},
          {"weight_replace_rate", cfg.weight_replace_rate},
          {"weight_limit", cfg.weight_limit},
          {"add_connection_rate", cfg.add_connection_rate},
          {"add_node_rate", cfg.add_node_rate},
          {"compatibility",
           {{"excess", cfg.compatibility.excess},
            {"disjoint", cfg.compatibility.disjoint},
            {"weight", cfg.compatibility.weight}}},
          {"compatibility_threshold", cfg.compatibility_threshold},
          {"survival_fraction", cfg.survival_fraction},
          {"crossover_rate", cfg.crossover_rate},
          {"stagnation_limit", cfg.stagnation_limit},
          {"hidden_activations", std::move(acts)}};
}

neuroevo::NeatConfig neat_config_from_json(const json& doc, neuroevo::NeatConfig cfg) {
  return guarded("NEAT config", [&] {
    check_keys(doc,
               {"population_size", "generations", "weight_mutate_rate", "weight_perturb_sigma", "weight_replace_rate",
                "weight_limit", "add_connection_rate", "add_node_rate", "compatibility", "compatibility_threshold",
                "survival_fraction", "crossover_rate", "stagnation_limit", "hidden_activations"},
               "NEAT config");
    read_if(doc, "population_size", cfg.population_size);
    read_if(doc, "generations", cfg.generations);
    read_if(doc, "weight_mutate_rate", cfg.weight_mutate_rate);
    read_if(doc, "weight_perturb_sigma", cfg.weight_perturb_sigma);
    read_if(doc, "weight_replace_rate", cfg.weight_replace_rate);
    read_if(doc, "weight_limit", cfg.weight_limit);
    read_if(doc, "add_connection_rate", cfg.add_connection_rate);
    read_if(doc, "add_node_rate", cfg.add_node_rate);
    if (doc.contains("compatibility")) {
      const auto& c = doc.at("compatibility");
      check_keys(c, {"excess", "disjoint", "weight"}, "compatibility coefficients");
      read_if(c, "excess", cfg.compatibility.excess);
      read_if(c, "disjoint", cfg.compatibility.disjoint);
      read_if(c, "weight", cfg.compatibility.weight);
    }
    read_if(doc, "compatibility_threshold", cfg.compatibility_threshold);
    read_if(doc, "survival_fraction", cfg.survival_fraction);
    read_if(doc, "crossover_rate", cfg.crossover_rate);
    read_if(doc, "stagnation_limit", cfg.stagnation_limit);
    if (doc.contains("hidden_activations")) {
      cfg.hidden_activations.clear();
      for (const auto& a : doc.at("hidden_activations")) cfg.hidden_activations.push_back(parse_activation(a.get<std::string>()));
    }
    neuroevo::validate(cfg);
    return cfg;
  });
}

json to_json(const fuzzyga::FgaConfig& cfg) {
  return {{"population_size", cfg.population_size},
          {"generations", cfg.generations},
          {"vertex_shift_rate", cfg.vertex_shift_rate},
          {"consequent_reset_rate", cfg.consequent_reset_rate},
          {"crossover_weights", cfg.crossover_weights},
          {"tournament_size", cfg.tournament_size},
          {"elitism", cfg.elitism},
          {"levels", cfg.levels}};
}

fuzzyga::FgaConfig fga_config_from_json(const json& doc, fuzzyga::FgaConfig cfg) {
  return guarded("fuzzy GA config", [&] {
    check_keys(doc,
               {"population_size", "generations", "vertex_shift_rate", "consequent_reset_rate", "crossover_weights",
                "tournament_size", "elitism", "levels"},
               "fuzzy GA config");
    read_if(doc, "population_size", cfg.population_size);
    read_if(doc, "generations", cfg.generations);
    read_if(doc, "vertex_shift_rate", cfg.vertex_shift_rate);
    read_if(doc, "consequent_reset_rate", cfg.consequent_reset_rate);
    read_if(doc, "crossover_weights", cfg.crossover_weights);
    read_if(doc, "tournament_size", cfg.tournament_size);
    read_if(doc, "elitism", cfg.elitism);
    read_if(doc, "levels", cfg.levels);
    fuzzyga::validate(cfg);
    return cfg;
  });
}

StudyFile study_file_from_json(const json& doc, const std::filesystem::path& base_dir) {
  return guarded("study config", [&] {
    check_keys(doc, {"dataset", "synthgen", "cases", "c3_boundary", "sweep", "trainer", "seeds", "jobs", "output"},
               "study config");
    StudyFile file;
    if (doc.contains("dataset") && doc.contains("synthgen")) {
      throw ValidationError("study config takes either 'dataset' or 'synthgen', not both");
    }
    if (doc.contains("dataset")) {
      std::filesystem::path p = doc.at("dataset").get<std::string>();
      file.dataset = p.is_absolute() ? p : base_dir / p;
    } else if (doc.contains("synthgen")) {
      file.synthgen = gen_config_from_json(doc.at("synthgen"));
    } else {
      file.synthgen = synthgen::default_gen_config();
    }

    double boundary = 550.0;
    read_if(doc, "c3_boundary", boundary);
    auto& study = file.study;
    for (auto& c : study.cases) c.region_boundary = boundary;
    if (doc.contains("cases")) {
      study.cases.clear();
      for (const auto& c : doc.at("cases")) {
        const auto name = c.get<std::string>();
        const auto kind = parse_split_kind(name);
        if (!kind) throw ValidationError("unknown case '" + name + "'");
        study.cases.push_back({*kind, boundary});
      }
    }

    if (doc.contains("sweep")) {
      const auto& s = doc.at("sweep");
      check_keys(s, {"alpha", "beta", "omega"}, "sweep");
      const experiment::Sweep full;
      auto symbols = [&](const char* slot, const auto& defaults) {
        std::vector<std::string> out;
        if (s.contains(slot)) return s.at(slot).get<std::vector<std::string>>();
        for (const auto v : defaults) out.emplace_back(experiment::to_string(v));
        return out;
      };
      study.sweep = experiment::make_sweep(symbols("alpha", full.alpha), symbols("beta", full.beta),
                                           symbols("omega", full.omega));
    }

    if (doc.contains("trainer")) {
      const auto& t = doc.at("trainer");
      check_keys(t, {"beta_neat", "omega_neat", "omega_fga", "alpha_neat", "alpha_fga", "fixed_angle"}, "trainer");
      auto& tr = study.trainer;
      if (t.contains("beta_neat")) tr.beta_neat = neat_config_from_json(t.at("beta_neat"), tr.beta_neat);
      if (t.contains("omega_neat")) tr.omega_neat = neat_config_from_json(t.at("omega_neat"), tr.omega_neat);
      if (t.contains("omega_fga")) tr.omega_fga = fga_config_from_json(t.at("omega_fga"), tr.omega_fga);
      if (t.contains("alpha_neat")) tr.alpha_neat = neat_config_from_json(t.at("alpha_neat"), tr.alpha_neat);
      if (t.contains("alpha_fga")) tr.alpha_fga = fga_config_from_json(t.at("alpha_fga"), tr.alpha_fga);
      read_if(t, "fixed_angle", tr.fixed_angle);
      if (!(tr.fixed_angle >= 0.0 && tr.fixed_angle <= 180.0)) throw ValidationError("fixed_angle must lie in [0,180]");
    }
    if (file.synthgen) study.trainer.terrain = file.synthgen->terrain;

    if (doc.contains("seeds")) {
      study.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
      if (study.seeds.empty()) throw ValidationError("seeds must not be empty");
    }
    read_if(doc, "jobs", study.jobs);
    if (study.jobs < 0) throw ValidationError("jobs must be >= 0");
    if (doc.contains("output")) {
      std::filesystem::path p = doc.at("output").get<std::string>();
      file.output = p.is_absolute() ? p : base_dir / p;
    }
    return file;
  });
}

StudyFile load_study_file(const std::filesystem::path& path) {
  return study_file_from_json(read_json_file(path), path.parent_path());
}

Dataset study_dataset(const StudyFile& file) {
  if (file.dataset) return load_dataset(*file.dataset);
  return synthgen::generate_dataset(file.synthgen.value_or(synthgen::default_gen_config()));
}

json results_to_json(const std::vector<experiment::CaseResult>& results) {
  json cases = json::array();
  for (const auto& r : results) {
    json configs = json::array();
    for (const auto& c : r.configs) {
      configs.push_back({{"config", agent_config_json(c.config)},
                         {"beta_train", metrics_json(c.beta_train)},
                         {"beta_validation", metrics_json(c.beta_validation)},
                         {"omega_train", metrics_json(c.omega_train)},
                         {"omega_validation", metrics_json(c.omega_validation)}});
    }
    cases.push_back({{"case", std::string(to_string(r.split_case.kind))},
                     {"region_boundary", r.split_case.region_boundary},
                     {"seed", r.seed},
                     {"configs", std::move(configs)},
                     {"best", r.best},
                     {"worst_omega", r.worst_omega},
                     {"system_train_acc", r.system_train_acc},
                     {"system_validation_acc", r.system_validation_acc}});
  }
  return {{"format", kResultsFormat}, {"results", std::move(cases)}};
}

std::vector<experiment::CaseResult> results_from_json(const json& doc) {
  return guarded("results document", [&] {
    if (!doc.is_object() || doc.value("format", "") != kResultsFormat) {
      throw ParseError(std::string("expected a '") + kResultsFormat + "' document");
    }
    std::vector<experiment::CaseResult> out;
    for (const auto& r : doc.at("results")) {
      experiment::CaseResult cr;
      const auto name = r.at("case").get<std::string>();
      const auto kind = parse_split_kind(name);
      if (!kind) throw ParseError("unknown case '" + name + "'");
      cr.split_case = {*kind, r.at("region_boundary").get<double>()};
      cr.seed = r.at("seed").get<std::uint64_t>();
      for (const auto& c : r.at("configs")) {
        cr.configs.push_back({agent_config_from_json(c.at("config")), metrics_from_json(c.at("beta_train")),
                              metrics_from_json(c.at("beta_validation")), metrics_from_json(c.at("omega_train")),
                              metrics_from_json(c.at("omega_validation"))});
      }
      cr.best = r.at("best").get<std::array<std::size_t, kSensorCount>>();
      cr.worst_omega = r.at("worst_omega").get<std::size_t>();
      for (const auto i : cr.best) {
        if (i >= cr.configs.size()) throw ParseError("best index out of range");
      }
      if (cr.worst_omega >= cr.configs.size()) throw ParseError("worst index out of range");
      cr.system_train_acc = r.at("system_train_acc").get<double>();
      cr.system_validation_acc = r.at("system_validation_acc").get<double>();
      out.push_back(std::move(cr));
    }
    return out;
  });
}

json agents_to_json(const std::vector<experiment::TrainedAgent>& agents) {
  json list = json::array();
  for (const auto& a : agents) {
    json entry{{"config", agent_config_json(a.config)},
               {"beta_model", to_json(a.beta_model)},
               {"alpha_policy", to_json(a.alpha_policy)}};
    if (a.omega_model) entry["omega_model"] = std::visit([](const auto& m) { return to_json(m); }, *a.omega_model);
    list.push_back(std::move(entry));
  }
  return {{"format", kAgentsFormat}, {"agents", std::move(list)}};
}

std::vector<experiment::TrainedAgent> agents_from_json(const json& doc) {
  return guarded("agents document", [&] {
    if (!doc.is_object() || doc.value("format", "") != kAgentsFormat) {
      throw ParseError(std::string("expected a '") + kAgentsFormat + "' document");
    }
    std::vector<experiment::TrainedAgent> out;
    for (const auto& a : doc.at("agents")) {
      experiment::TrainedAgent agent{agent_config_from_json(a.at("config")), net_genome_from_json(a.at("beta_model")),
                                     std::nullopt, alpha_policy_from_json(a.at("alpha_policy"))};
      const bool needs_model = agent.config.omega == experiment::OmegaSymbol::N ||
                               agent.config.omega == experiment::OmegaSymbol::F;
      if (needs_model != a.contains("omega_model")) {
        throw ValidationError("agent " + experiment::label(agent.config) + ": omega model presence does not match its method");
      }
      if (agent.config.omega == experiment::OmegaSymbol::N) agent.omega_model = net_genome_from_json(a.at("omega_model"));
      if (agent.config.omega == experiment::OmegaSymbol::F) agent.omega_model = fuzzy_system_from_json(a.at("omega_model"));
      out.push_back(std::move(agent));
    }
    return out;
  });
}

}  // namespace cod2m::io
