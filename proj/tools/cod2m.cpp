#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "cod2m/dataset.hpp"
#include "cod2m/error.hpp"
#include "cod2m/experiment.hpp"
#include "cod2m/serialize.hpp"
#include "cod2m/study_io.hpp"
#include "cod2m/synthgen.hpp"
#include "cod2m/text.hpp"

namespace fs = std::filesystem;
using namespace cod2m;

namespace {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
  const char* env = std::getenv("COD2M_LOG");
  if (env == nullptr) return LogLevel::Info;
  const std::string_view v(env);
  if (v == "error") return LogLevel::Error;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Info;
}

void log(LogLevel level, const std::string& message) {
  static const LogLevel threshold = log_level();
  if (level > threshold) return;
  static constexpr const char* names[] = {"error", "info", "debug"};
  std::cerr << "cod2m: " << names[static_cast<int>(level)] << ": " << message << '\n';
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::vector<SplitCase> parse_cases(const std::string& list, double boundary) {
  std::vector<SplitCase> cases;
  for (const auto item : text::split(list, ',')) {
    const auto name = text::trim(item);
    const auto kind = parse_split_kind(name);
    if (!kind) throw ValidationError("unknown case '" + std::string(name) + "' (allowed: C1, C2, C3)");
    cases.push_back({*kind, boundary});
  }
  if (cases.empty()) throw ValidationError("--cases lists no case");
  return cases;
}

struct Options {
  std::string config;
  std::string out;
  std::string dataset;
  std::string models;
  std::string results;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string cases;
  std::string sweep;
};

int run_generate(const Options& o) {
  auto cfg = o.config.empty() ? synthgen::default_gen_config() : io::gen_config_from_json(read_json_file(o.config));
  if (o.seed) cfg.seed = *o.seed;
  const auto data = synthgen::generate_dataset(cfg);
  save_dataset(data, o.out);
  log(LogLevel::Info, "wrote " + std::to_string(data.size()) + " samples to " + o.out);
  return 0;
}

io::StudyFile study_file(const Options& o) {
  io::StudyFile file;
  if (!o.config.empty()) {
    file = io::load_study_file(o.config);
  } else {
    file.synthgen = synthgen::default_gen_config();
  }
  if (!o.sweep.empty()) file.study.sweep = experiment::parse_sweep(o.sweep);
  if (!o.cases.empty()) {
    const double boundary = file.study.cases.empty() ? 550.0 : file.study.cases.front().region_boundary;
    file.study.cases = parse_cases(o.cases, boundary);
  }
  if (o.jobs) {
    if (*o.jobs < 0) throw ValidationError("--jobs must be >= 0");
    file.study.jobs = *o.jobs;
  }
  if (o.seed) {
    auto& seeds = file.study.seeds;
    for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = *o.seed + i;
    if (file.synthgen) file.synthgen->seed = *o.seed;
  }
  return file;
}

int run_train(const Options& o) {
  auto file = study_file(o);
  const auto data = load_dataset(o.dataset);
  std::vector<experiment::AgentConfig> configs;
  for (const auto& per_agent : experiment::enumerate_configs(file.study.sweep)) {
    configs.insert(configs.end(), per_agent.begin(), per_agent.end());
  }
  const auto seed = file.study.seeds.front();
  log(LogLevel::Info, "training " + std::to_string(configs.size()) + " agent configurations on " +
                          std::to_string(data.size()) + " samples");
  const auto agents = experiment::train_agents(data, configs, file.study.trainer, seed);
  ensure_dir(o.out);
  write_json_file(io::agents_to_json(agents), fs::path(o.out) / "agents.json");
  log(LogLevel::Info, "wrote " + (fs::path(o.out) / "agents.json").string());
  return 0;
}

int run_evaluate(const Options& o) {
  const auto agents = io::agents_from_json(read_json_file(fs::path(o.models) / "agents.json"));
  const auto data = load_dataset(o.dataset);
  const auto ev = experiment::evaluate(agents, data);
  ensure_dir(o.out);

  auto scores = open_out(fs::path(o.out) / "scores.csv");
  scores << "sample_id,truth,config,beta,omega\n";
  for (std::size_t i = 0; i < ev.sample_ids.size(); ++i) {
    for (const auto& a : ev.agents) {
      scores << ev.sample_ids[i] << ',' << (ev.truths[i] ? 1 : 0) << ',' << experiment::label(a.config) << ','
             << text::format_real(a.beta_scores[i]) << ',' << text::format_real(a.omega_scores[i]) << '\n';
    }
  }
  auto table = open_out(fs::path(o.out) / "metrics.csv");
  table << "config,level,acc,rmse,auc\n";
  for (const auto& a : ev.agents) {
    for (const auto& [level, m] : {std::pair{"beta", &a.beta}, std::pair{"omega", &a.omega}}) {
      table << experiment::label(a.config) << ',' << level << ',' << text::format_real(m->acc) << ','
            << text::format_real(m->rmse) << ',' << text::format_real(m->auc) << '\n';
    }
  }
  if (!scores || !table) throw IoError("write failed under " + o.out);
  log(LogLevel::Info, "evaluated " + std::to_string(agents.size()) + " agents on " + std::to_string(data.size()) + " samples");
  return 0;
}

int run_study(const Options& o) {
  auto file = study_file(o);
  fs::path out;
  if (!o.out.empty()) {
    out = o.out;
  } else if (file.output) {
    out = *file.output;
  } else {
    throw ValidationError("study needs --out or an 'output' entry in its config");
  }
  const auto data = io::study_dataset(file);
  log(LogLevel::Info, "study over " + std::to_string(data.size()) + " samples, " +
                          std::to_string(file.study.cases.size()) + " cases x " +
                          std::to_string(file.study.seeds.size()) + " seeds");
  const auto results = experiment::run_study(data, file.study);
  ensure_dir(out);
  write_json_file(io::results_to_json(results), out / "results.json");
  experiment::report(results, out);
  for (const auto& r : results) {
    log(LogLevel::Debug, std::string(to_string(r.split_case.kind)) + " seed " + std::to_string(r.seed) +
                             ": best omega AUC gap " + text::format_real(experiment::best_omega_auc_gap(r)));
  }
  log(LogLevel::Info, "results written to " + out.string());
  return 0;
}

int run_report(const Options& o) {
  const auto results = io::results_from_json(read_json_file(fs::path(o.results) / "results.json"));
  experiment::report(results, o.out);
  log(LogLevel::Info, "report written to " + o.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative and distributed IED decision-making: data generation, training and studies", "cod2m"};
  app.require_subcommand(1);
  Options o;

  auto* generate = app.add_subcommand("generate", "Generate a synthetic two-day dataset");
  generate->add_option("--config", o.config, "Generator config (JSON); defaults when omitted");
  generate->add_option("--out", o.out, "Dataset file to write")->required();
  generate->add_option("--seed", o.seed, "Override the generator seed");

  auto* train = app.add_subcommand("train", "Train every agent configuration on a dataset");
  train->add_option("--dataset", o.dataset, "Dataset file")->required();
  train->add_option("--config", o.config, "Study config (JSON) supplying sweep and trainer settings");
  train->add_option("--out", o.out, "Directory for agents.json")->required();
  train->add_option("--seed", o.seed, "Training seed");
  train->add_option("--sweep", o.sweep, "Per-slot symbols, e.g. alpha=P;omega=N,F,V");

  auto* evaluate = app.add_subcommand("evaluate", "Score a dataset with trained agents");
  evaluate->add_option("--models", o.models, "Directory holding agents.json")->required();
  evaluate->add_option("--dataset", o.dataset, "Dataset file")->required();
  evaluate->add_option("--out", o.out, "Directory for scores.csv and metrics.csv")->required();

  auto* study = app.add_subcommand("study", "Run the split-case study and write its tables");
  study->add_option("--config", o.config, "Study config (JSON)");
  study->add_option("--out", o.out, "Results directory (overrides the config's output)");
  study->add_option("--seed", o.seed, "First seed; replaces the config's seeds with consecutive ones");
  study->add_option("--jobs", o.jobs, "Concurrent study units (0: all cores)");
  study->add_option("--cases", o.cases, "Comma-separated cases, e.g. C1,C2,C3");
  study->add_option("--sweep", o.sweep, "Per-slot symbols, e.g. alpha=P;omega=N,F,V");

  auto* report = app.add_subcommand("report", "Rewrite the CSV tables from a results directory");
  report->add_option("--results", o.results, "Directory holding results.json")->required();
  report->add_option("--out", o.out, "Directory for the tables")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "cod2m: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*generate) return run_generate(o);
    if (*train) return run_train(o);
    if (*evaluate) return run_evaluate(o);
    if (*study) return run_study(o);
    if (*report) return run_report(o);
  } catch (const IoError& e) {
    log(LogLevel::Error, e.what());
    return 3;
  } catch (const Error& e) {
    log(LogLevel::Error, e.what());
    return 2;
  } catch (const std::exception& e) {
    log(LogLevel::Error, e.what());
    return 2;
  }
  return 1;
}
