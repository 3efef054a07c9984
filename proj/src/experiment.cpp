#include "cod2m/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <thread>
#include <tuple>
#include <unordered_set>

#include "cod2m/error.hpp"
#include "cod2m/rng.hpp"
#include "cod2m/text.hpp"

namespace cod2m::experiment {

std::string_view to_string(AlphaSymbol s) {
  switch (s) {
    case AlphaSymbol::N: return "N";
    case AlphaSymbol::F: return "F";
    case AlphaSymbol::P: return "P";
    case AlphaSymbol::R: return "R";
  }
  return "?";
}

std::string_view to_string(BetaSymbol) { return "N"; }

std::string_view to_string(OmegaSymbol s) {
  switch (s) {
    case OmegaSymbol::N: return "N";
    case OmegaSymbol::F: return "F";
    case OmegaSymbol::V: return "V";
    case OmegaSymbol::M: return "M";
    case OmegaSymbol::Bavg: return "Bavg";
    case OmegaSymbol::Bmdn: return "Bmdn";
  }
  return "?";
}

AlphaSymbol parse_alpha(std::string_view s) {
  for (const auto a : {AlphaSymbol::N, AlphaSymbol::F, AlphaSymbol::P, AlphaSymbol::R}) {
    if (to_string(a) == s) return a;
  }
  throw ValidationError("'" + std::string(s) + "' is not an alpha method (allowed: N, F, P, R)");
}

BetaSymbol parse_beta(std::string_view s) {
  if (s == "N") return BetaSymbol::N;
  throw ValidationError("'" + std::string(s) + "' is not a beta method (allowed: N)");
}

OmegaSymbol parse_omega(std::string_view s) {
  for (const auto o : {OmegaSymbol::N, OmegaSymbol::F, OmegaSymbol::V, OmegaSymbol::M, OmegaSymbol::Bavg,
                       OmegaSymbol::Bmdn}) {
    if (to_string(o) == s) return o;
  }
  throw ValidationError("'" + std::string(s) + "' is not an omega method (allowed: N, F, V, M, Bavg, Bmdn)");
}

std::string label(const AgentConfig& c) {
  return std::string(to_string(c.sensor)) + ":" + std::string(to_string(c.alpha)) + "/" +
         std::string(to_string(c.beta)) + "/" + std::string(to_string(c.omega));
}

namespace {

template <typename T, typename Parse>
std::vector<T> parse_list(const std::vector<std::string>& symbols, Parse parse, std::string_view slot) {
  if (symbols.empty()) throw ValidationError(std::string(slot) + " sweep slot is empty");
  std::vector<T> out;
  for (const auto& s : symbols) {
    const T v = parse(text::trim(s));
    if (std::find(out.begin(), out.end(), v) != out.end()) {
      throw ValidationError("symbol '" + s + "' repeated in the " + std::string(slot) + " sweep slot");
    }
    out.push_back(v);
  }
  return out;
}

auto config_key(const AgentConfig& c) { return std::make_tuple(c.sensor, c.alpha, c.beta, c.omega); }

}  // namespace

Sweep make_sweep(const std::vector<std::string>& alpha, const std::vector<std::string>& beta,
                 const std::vector<std::string>& omega) {
  Sweep s;
  s.alpha = parse_list<AlphaSymbol>(alpha, parse_alpha, "alpha");
  s.beta = parse_list<BetaSymbol>(beta, parse_beta, "beta");
  s.omega = parse_list<OmegaSymbol>(omega, parse_omega, "omega");
  return s;
}

Sweep parse_sweep(std::string_view symbols) {
  Sweep sweep;
  for (const auto part : text::split(symbols, ';')) {
    const auto item = text::trim(part);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ValidationError("sweep slot must look like slot=A,B,...");
    const auto slot = text::trim(item.substr(0, eq));
    std::vector<std::string> symbols;
    for (const auto sym : text::split(item.substr(eq + 1), ',')) symbols.emplace_back(text::trim(sym));
    if (slot == "alpha") {
      sweep.alpha = parse_list<AlphaSymbol>(symbols, parse_alpha, "alpha");
    } else if (slot == "beta") {
      sweep.beta = parse_list<BetaSymbol>(symbols, parse_beta, "beta");
    } else if (slot == "omega") {
      sweep.omega = parse_list<OmegaSymbol>(symbols, parse_omega, "omega");
    } else {
      throw ValidationError("unknown sweep slot '" + std::string(slot) + "'");
    }
  }
  return sweep;
}

std::array<std::vector<AgentConfig>, kSensorCount> enumerate_configs(const Sweep& sweep) {
  std::array<std::vector<AgentConfig>, kSensorCount> out;
  for (const auto sensor : kAllSensors) {
    for (const auto a : sweep.alpha) {
      for (const auto b : sweep.beta) {
        for (const auto o : sweep.omega) out[index_of(sensor)].push_back({sensor, a, b, o});
      }
    }
  }
  return out;
}

TrainerConfig default_trainer_config() {
  TrainerConfig t;
  t.beta_neat.population_size = 100;
  t.beta_neat.generations = 40;
  t.omega_neat.population_size = 100;
  t.omega_neat.generations = 40;
  t.omega_fga.population_size = 40;
  t.omega_fga.generations = 40;
  t.alpha_neat.population_size = 30;
  t.alpha_neat.generations = 10;
  t.alpha_fga.population_size = 20;
  t.alpha_fga.generations = 10;
  return t;
}

std::vector<TrainingRow> beta_rows(const Dataset& data, SensorKind sensor) {
  std::vector<TrainingRow> rows;
  rows.reserve(data.size());
  for (const auto& s : data.samples()) rows.push_back({s.feature(sensor), s.label ? 1.0 : 0.0});
  return rows;
}

double best_alpha_angle(const synthgen::Terrain& terrain, Position position) {
  double best_angle = 90.0;
  double best_distance = synthgen::distance_to_nearest_ied(terrain, synthgen::aimed_point(terrain, position, 90.0));
  for (int angle = 0; angle <= 180; angle += 15) {
    const double d = synthgen::distance_to_nearest_ied(terrain, synthgen::aimed_point(terrain, position, angle));
    if (d < best_distance - 1e-9) {
      best_distance = d;
      best_angle = angle;
    }
  }
  return best_angle;
}

namespace {

std::array<double, kSensorCount> betas_for(const std::array<CompiledNet const*, kSensorCount>& nets,
                                           const Sample& s, std::vector<double>& scratch) {
  std::array<double, kSensorCount> b{};
  for (const auto k : kAllSensors) b[index_of(k)] = (*nets[index_of(k)])(s.feature(k), scratch);
  return b;
}

}  // namespace

std::vector<TrainedAgent> train_agents(const Dataset& train, const std::vector<AgentConfig>& configs,
                                       const TrainerConfig& trainer, std::uint64_t seed) {
  const auto& dims = train.header().dims;

  std::array<NetGenome, kSensorCount> beta_models;
  for (const auto k : kAllSensors) {
    auto cfg = trainer.beta_neat;
    cfg.seed = derive_seed(seed, tag_hash("beta"), index_of(k));
    const auto rows = beta_rows(train, k);
    beta_models[index_of(k)] = neuroevo::evolve(rows, cfg, static_cast<int>(dims[index_of(k)])).best;
  }

  std::vector<CompiledNet> compiled;
  compiled.reserve(kSensorCount);
  for (const auto& g : beta_models) compiled.emplace_back(g);
  std::array<CompiledNet const*, kSensorCount> nets{};
  for (std::size_t i = 0; i < kSensorCount; ++i) nets[i] = &compiled[i];

  std::vector<TrainingRow> omega_rows;
  std::vector<double> scratch;
  for (const auto& s : train.samples()) {
    const auto b = betas_for(nets, s, scratch);
    omega_rows.push_back({std::vector<double>(b.begin(), b.end()), s.label ? 1.0 : 0.0});
  }

  std::map<std::pair<SensorKind, OmegaSymbol>, OmegaModel> omega_cache;
  std::map<std::pair<SensorKind, AlphaSymbol>, AlphaPolicy> alpha_cache;

  const auto omega_model = [&](SensorKind k, OmegaSymbol o) -> const OmegaModel& {
    const auto key = std::make_pair(k, o);
    if (const auto it = omega_cache.find(key); it != omega_cache.end()) return it->second;
    const auto model_seed = derive_seed(seed, tag_hash(o == OmegaSymbol::N ? "omega-N" : "omega-F"), index_of(k));
    if (o == OmegaSymbol::N) {
      auto cfg = trainer.omega_neat;
      cfg.seed = model_seed;
      return omega_cache.emplace(key, neuroevo::evolve(omega_rows, cfg, kSensorCount).best).first->second;
    }
    auto cfg = trainer.omega_fga;
    cfg.seed = model_seed;
    return omega_cache.emplace(key, fuzzyga::evolve(omega_rows, cfg, kSensorCount).best).first->second;
  };

  const auto alpha_policy = [&](SensorKind k, AlphaSymbol a) -> AlphaPolicy {
    if (a == AlphaSymbol::P) return FixedPointAlpha{trainer.fixed_angle};
    if (a == AlphaSymbol::R) return RandomAlpha{};
    const auto key = std::make_pair(k, a);
    if (const auto it = alpha_cache.find(key); it != alpha_cache.end()) return it->second;
    std::vector<TrainingRow> rows;
    for (const auto& s : train.samples()) {
      rows.push_back({s.feature(k), best_alpha_angle(trainer.terrain, s.position) / 180.0});
    }
    const auto model_seed = derive_seed(seed, tag_hash(a == AlphaSymbol::N ? "alpha-N" : "alpha-F"), index_of(k));
    const int inputs = static_cast<int>(dims[index_of(k)]);
    if (a == AlphaSymbol::N) {
      auto cfg = trainer.alpha_neat;
      cfg.seed = model_seed;
      return alpha_cache.emplace(key, neuroevo::evolve(rows, cfg, inputs).best).first->second;
    }
    auto cfg = trainer.alpha_fga;
    cfg.seed = model_seed;
    return alpha_cache.emplace(key, fuzzyga::evolve(rows, cfg, inputs).best).first->second;
  };

  std::vector<TrainedAgent> agents;
  agents.reserve(configs.size());
  for (const auto& c : configs) {
    TrainedAgent agent{c, beta_models[index_of(c.sensor)], std::nullopt, alpha_policy(c.sensor, c.alpha)};
    if (c.omega == OmegaSymbol::N || c.omega == OmegaSymbol::F) agent.omega_model = omega_model(c.sensor, c.omega);
    agents.push_back(std::move(agent));
  }
  return agents;
}

double omega_value(const TrainedAgent& agent, const fusion::BetaSet& betas) {
  switch (agent.config.omega) {
    case OmegaSymbol::N:
    case OmegaSymbol::F:
      if (!agent.omega_model) throw ValidationError("agent " + label(agent.config) + " has no omega model");
      return std::visit([&](const auto& m) { return fusion::omega(betas, fusion::OmegaMethod{m}); }, *agent.omega_model);
    case OmegaSymbol::V: return fusion::vote(betas);
    case OmegaSymbol::M: return fusion::aggregate(betas, fusion::AggKind::Max);
    case OmegaSymbol::Bavg: return fusion::aggregate(betas, fusion::AggKind::Avg);
    case OmegaSymbol::Bmdn: return fusion::aggregate(betas, fusion::AggKind::Mdn);
  }
  throw ValidationError("unknown omega method");
}

LevelMetrics level_metrics(const std::vector<double>& scores, const std::vector<bool>& truths) {
  const auto flags = std::make_unique<bool[]>(truths.size());
  std::copy(truths.begin(), truths.end(), flags.get());
  const std::span<const bool> labels(flags.get(), truths.size());
  LevelMetrics m;
  m.acc = metrics::accuracy(scores, labels);
  std::vector<double> expected(truths.size());
  for (std::size_t i = 0; i < truths.size(); ++i) expected[i] = truths[i] ? 1.0 : 0.0;
  m.rmse = metrics::rmse(expected, scores);
  m.roc = metrics::roc(scores, labels);
  m.auc = metrics::auc(m.roc);
  return m;
}

Evaluation evaluate(const std::vector<TrainedAgent>& agents, const Dataset& data) {
  std::array<std::optional<CompiledNet>, kSensorCount> beta_nets;
  for (const auto& a : agents) {
    auto& slot = beta_nets[index_of(a.config.sensor)];
    if (slot) continue;
    const auto dim = data.header().dims[index_of(a.config.sensor)];
    if (a.beta_model.input_count != static_cast<int>(dim)) {
      throw ValidationError("beta model of " + label(a.config) + " expects " + std::to_string(a.beta_model.input_count) +
                            " features, dataset has " + std::to_string(dim));
    }
    slot.emplace(a.beta_model);
  }
  for (const auto k : kAllSensors) {
    if (!beta_nets[index_of(k)]) {
      throw ValidationError("agents must include every sensor; missing " + std::string(to_string(k)));
    }
  }
  std::array<CompiledNet const*, kSensorCount> nets{};
  for (std::size_t i = 0; i < kSensorCount; ++i) nets[i] = &*beta_nets[i];

  bool team = agents.size() == kSensorCount;
  for (std::size_t i = 0; team && i < kSensorCount; ++i) team = agents[i].config.sensor == kAllSensors[i];

  Evaluation ev;
  ev.agents.resize(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i) ev.agents[i].config = agents[i].config;

  std::vector<double> scratch;
  for (const auto& s : data.samples()) {
    ev.sample_ids.push_back(s.id);
    ev.truths.push_back(s.label);
    const fusion::BetaSet betas(betas_for(nets, s, scratch));
    std::array<double, kSensorCount> team_omegas{};
    for (std::size_t i = 0; i < agents.size(); ++i) {
      auto& out = ev.agents[i];
      out.beta_scores.push_back(betas[agents[i].config.sensor]);
      out.omega_scores.push_back(omega_value(agents[i], betas));
      if (team) team_omegas[i] = out.omega_scores.back();
    }
    if (team) ev.system.push_back(fusion::system_decision(team_omegas));
  }
  for (auto& a : ev.agents) {
    a.beta = level_metrics(a.beta_scores, ev.truths);
    a.omega = level_metrics(a.omega_scores, ev.truths);
  }
  return ev;
}

std::array<std::size_t, kSensorCount> select_best(const std::vector<ConfigResult>& configs) {
  std::array<std::size_t, kSensorCount> best{};
  std::array<bool, kSensorCount> seen{};
  const auto better = [](const ConfigResult& l, const ConfigResult& r) {
    if (l.omega_validation.acc != r.omega_validation.acc) return l.omega_validation.acc > r.omega_validation.acc;
    if (l.omega_validation.rmse != r.omega_validation.rmse) return l.omega_validation.rmse < r.omega_validation.rmse;
    return config_key(l.config) < config_key(r.config);
  };
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto k = index_of(configs[i].config.sensor);
    if (!seen[k] || better(configs[i], configs[best[k]])) {
      best[k] = i;
      seen[k] = true;
    }
  }
  for (const auto k : kAllSensors) {
    if (!seen[index_of(k)]) throw ValidationError("no configuration for sensor " + std::string(to_string(k)));
  }
  return best;
}

namespace {

std::size_t select_worst_omega(const std::vector<ConfigResult>& configs) {
  std::size_t worst = 0;
  for (std::size_t i = 1; i < configs.size(); ++i) {
    const auto& c = configs[i];
    const auto& w = configs[worst];
    if (c.omega_validation.auc < w.omega_validation.auc ||
        (c.omega_validation.auc == w.omega_validation.auc && config_key(c.config) < config_key(w.config))) {
      worst = i;
    }
  }
  return worst;
}

double system_accuracy(const Evaluation& ev) {
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ev.system.size(); ++i) correct += ev.system[i].verdict == ev.truths[i] ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(ev.system.size());
}

}  // namespace

CaseResult run_case(const Dataset& dataset, const SplitCase& split_case, const StudyConfig& config,
                    std::uint64_t seed) {
  const auto parts = split(dataset, split_case);

  std::unordered_set<std::int64_t> train_ids;
  for (const auto& s : parts.train.samples()) train_ids.insert(s.id);
  for (const auto& s : parts.validation.samples()) {
    if (train_ids.contains(s.id)) throw std::logic_error("validation sample leaked into training");
  }

  std::vector<AgentConfig> configs;
  for (const auto& per_agent : enumerate_configs(config.sweep)) configs.insert(configs.end(), per_agent.begin(), per_agent.end());

  const auto unit_seed = derive_seed(seed, tag_hash(to_string(split_case.kind)));
  const auto agents = train_agents(parts.train, configs, config.trainer, unit_seed);
  const auto on_train = evaluate(agents, parts.train);
  const auto on_validation = evaluate(agents, parts.validation);

  CaseResult result;
  result.split_case = split_case;
  result.seed = seed;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    result.configs.push_back({configs[i], on_train.agents[i].beta, on_validation.agents[i].beta,
                              on_train.agents[i].omega, on_validation.agents[i].omega});
  }
  result.best = select_best(result.configs);
  result.worst_omega = select_worst_omega(result.configs);

  std::vector<TrainedAgent> team;
  for (const auto idx : result.best) team.push_back(agents[idx]);
  result.system_train_acc = system_accuracy(evaluate(team, parts.train));
  result.system_validation_acc = system_accuracy(evaluate(team, parts.validation));
  return result;
}

std::vector<CaseResult> run_study(const Dataset& dataset, const StudyConfig& config) {
  if (config.cases.empty() || config.seeds.empty()) throw ValidationError("study needs at least one case and one seed");
  struct Unit {
    SplitCase split_case;
    std::uint64_t seed;
  };
  std::vector<Unit> units;
  for (const auto& c : config.cases) {
    for (const auto s : config.seeds) units.push_back({c, s});
  }
  // Surface split errors before spending any training time.
  for (const auto& c : config.cases) split(dataset, c);

  std::vector<std::optional<CaseResult>> results(units.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    while (true) {
      const auto i = next.fetch_add(1);
      if (i >= units.size()) return;
      try {
        results[i] = run_case(dataset, units[i].split_case, config, units[i].seed);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = units.size();
      }
    }
  };

  auto jobs = config.jobs > 0 ? static_cast<std::size_t>(config.jobs) : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min(jobs, units.size());
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<CaseResult> out;
  out.reserve(results.size());
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

double best_omega_auc_gap(const CaseResult& result) {
  double gap = 0.0;
  for (const auto idx : result.best) {
    const auto& c = result.configs[idx];
    gap += std::abs(c.omega_train.auc - c.omega_validation.auc);
  }
  return gap / static_cast<double>(kSensorCount);
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void write_roc(const metrics::RocCurve& curve, const std::filesystem::path& path) {
  auto out = open_out(path);
  metrics::write_roc_csv(curve, out);
  if (!out) throw IoError("write failed for " + path.string());
}

struct SummaryRow {
  std::uint64_t seed;
  SensorKind agent;
  std::string level;
  std::string config;
  std::array<double, 6> values;  // train acc, rmse, auc, validation acc, rmse, auc
};

constexpr std::array<const char*, 6> kMetricColumns{"train_acc",      "train_rmse",      "train_auc",
                                                     "validation_acc", "validation_rmse", "validation_auc"};

bool lower_is_better(std::size_t column) { return column == 1 || column == 4; }

}  // namespace

void report(const std::vector<CaseResult>& results, const std::filesystem::path& out_dir) {
  if (results.empty()) throw ValidationError("nothing to report");
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "roc", ec);
  if (ec) throw IoError("cannot create " + (out_dir / "roc").string() + ": " + ec.message());

  std::vector<SplitKind> kinds;
  for (const auto& r : results) {
    if (std::find(kinds.begin(), kinds.end(), r.split_case.kind) == kinds.end()) kinds.push_back(r.split_case.kind);
  }

  auto system_out = open_out(out_dir / "system.csv");
  system_out << "case,seed,train_acc,validation_acc\n";
  for (const auto& r : results) {
    system_out << to_string(r.split_case.kind) << ',' << r.seed << ',' << text::format_real(r.system_train_acc) << ','
               << text::format_real(r.system_validation_acc) << '\n';
  }

  for (const auto kind : kinds) {
    const std::string case_name(to_string(kind));
    auto summary = open_out(out_dir / ("summary_" + case_name + ".csv"));
    auto dist = open_out(out_dir / ("auc_" + case_name + ".csv"));
    summary << "seed,agent,level,config";
    for (const auto* col : kMetricColumns) summary << ',' << col;
    summary << ",best\n";
    dist << "seed,agent,config,level,split,auc\n";

    for (const auto& r : results) {
      if (r.split_case.kind != kind) continue;
      const auto prefix = case_name + "_seed" + std::to_string(r.seed);

      std::vector<SummaryRow> rows;
      for (const auto level : {"beta", "omega"}) {
        for (const auto k : kAllSensors) {
          const auto& c = r.configs[r.best[index_of(k)]];
          const bool beta = std::string_view(level) == "beta";
          const auto& tr = beta ? c.beta_train : c.omega_train;
          const auto& va = beta ? c.beta_validation : c.omega_validation;
          rows.push_back({r.seed, k, level, label(c.config), {tr.acc, tr.rmse, tr.auc, va.acc, va.rmse, va.auc}});
          const auto stem = prefix + "_" + std::string(to_string(k)) + "_" + level;
          write_roc(tr.roc, out_dir / "roc" / (stem + "_train.csv"));
          write_roc(va.roc, out_dir / "roc" / (stem + "_validation.csv"));
        }
      }
      // Flag the best value per metric column within each level, like bold entries in a results table.
      for (std::size_t start = 0; start < rows.size(); start += kSensorCount) {
        std::array<double, 6> best{};
        for (std::size_t col = 0; col < 6; ++col) {
          best[col] = rows[start].values[col];
          for (std::size_t i = start; i < start + kSensorCount; ++i) {
            const double v = rows[i].values[col];
            best[col] = lower_is_better(col) ? std::min(best[col], v) : std::max(best[col], v);
          }
        }
        for (std::size_t i = start; i < start + kSensorCount; ++i) {
          const auto& row = rows[i];
          summary << row.seed << ',' << to_string(row.agent) << ',' << row.level << ',' << row.config;
          for (const double v : row.values) summary << ',' << text::format_real(v);
          std::string flags;
          for (std::size_t col = 0; col < 6; ++col) {
            if (row.values[col] == best[col]) flags += (flags.empty() ? "" : ";") + std::string(kMetricColumns[col]);
          }
          summary << ',' << flags << '\n';
        }
      }

      const auto& worst = r.configs[r.worst_omega];
      write_roc(worst.omega_train.roc, out_dir / "roc" / (prefix + "_worst_omega_train.csv"));
      write_roc(worst.omega_validation.roc, out_dir / "roc" / (prefix + "_worst_omega_validation.csv"));

      for (const auto k : kAllSensors) {
        const auto& c = r.configs[r.best[index_of(k)]];
        dist << r.seed << ',' << to_string(k) << ',' << to_string(k) << ":N,beta,train," << text::format_real(c.beta_train.auc) << '\n';
        dist << r.seed << ',' << to_string(k) << ',' << to_string(k) << ":N,beta,validation,"
             << text::format_real(c.beta_validation.auc) << '\n';
      }
      for (const auto& c : r.configs) {
        dist << r.seed << ',' << to_string(c.config.sensor) << ',' << label(c.config) << ",omega,train,"
             << text::format_real(c.omega_train.auc) << '\n';
        dist << r.seed << ',' << to_string(c.config.sensor) << ',' << label(c.config) << ",omega,validation,"
             << text::format_real(c.omega_validation.auc) << '\n';
      }
    }
    if (!summary || !dist) throw IoError("write failed under " + out_dir.string());
  }
}

std::vector<ScanStep> scan_in_the_loop(const std::array<TrainedAgent, kSensorCount>& team,
                                       const synthgen::GenConfig& world, const std::vector<Position>& path, int day,
                                       std::uint64_t seed) {
  if (day != 1 && day != 2) throw ValidationError("scan day must be 1 or 2");
  for (std::size_t i = 0; i < kSensorCount; ++i) {
    if (team[i].config.sensor != kAllSensors[i]) throw ValidationError("team must list VS, IR, UV, TM, GP in order");
  }
  const auto& cond = world.day_conditions[static_cast<std::size_t>(day - 1)];
  Rng rng(seed);
  std::array<FeatureVector, kSensorCount> previous;
  for (auto& p : previous) p.assign(synthgen::kFeatureDims, 0.0);

  std::vector<ScanStep> steps;
  for (const auto& pos : path) {
    ScanStep step;
    step.position = pos;
    for (std::size_t k = 0; k < kSensorCount; ++k) {
      step.angles[k] = alpha_decide(team[k].alpha_policy, previous[k], rng);
      const auto sample = synthgen::acquire_sample(world.terrain, world.sensor_models, pos, cond, step.angles[k], rng);
      step.truth = sample.label;
      previous[k] = sample.features[k];
      step.betas[k] = ann_forward(team[k].beta_model, previous[k]);
    }
    const fusion::BetaSet betas(step.betas);
    for (std::size_t k = 0; k < kSensorCount; ++k) step.omegas[k] = omega_value(team[k], betas);
    step.decision = fusion::system_decision(step.omegas);
    steps.push_back(step);
  }
  return steps;
}

}  // namespace cod2m::experiment
