#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cod2m/dataset.hpp"
#include "cod2m/fusion.hpp"
#include "cod2m/fuzzyga.hpp"
#include "cod2m/metrics.hpp"
#include "cod2m/models.hpp"
#include "cod2m/neuroevo.hpp"
#include "cod2m/synthgen.hpp"

namespace cod2m::experiment {

// Method symbols per decision slot.
enum class AlphaSymbol : std::uint8_t { N, F, P, R };
enum class BetaSymbol : std::uint8_t { N };
enum class OmegaSymbol : std::uint8_t { N, F, V, M, Bavg, Bmdn };

std::string_view to_string(AlphaSymbol s);
std::string_view to_string(BetaSymbol s);
std::string_view to_string(OmegaSymbol s);

/// Throw ValidationError for symbols the slot does not allow (for example F for beta).
AlphaSymbol parse_alpha(std::string_view s);
BetaSymbol parse_beta(std::string_view s);
OmegaSymbol parse_omega(std::string_view s);

struct AgentConfig {
  SensorKind sensor = SensorKind::VS;
  AlphaSymbol alpha = AlphaSymbol::P;
  BetaSymbol beta = BetaSymbol::N;
  OmegaSymbol omega = OmegaSymbol::V;

  bool operator==(const AgentConfig&) const = default;
};

/// "VS:P/N/Bavg"
std::string label(const AgentConfig& config);

/// Allowed symbols per slot. Parsed from strings so illegal slot/symbol pairs are rejected.
struct Sweep {
  std::vector<AlphaSymbol> alpha{AlphaSymbol::N, AlphaSymbol::F, AlphaSymbol::P, AlphaSymbol::R};
  std::vector<BetaSymbol> beta{BetaSymbol::N};
  std::vector<OmegaSymbol> omega{OmegaSymbol::N, OmegaSymbol::F, OmegaSymbol::V,
                                 OmegaSymbol::M, OmegaSymbol::Bavg, OmegaSymbol::Bmdn};
};

/// From per-slot symbol lists, e.g. {"P"}, {"N"}, {"N","F","V"}.
Sweep make_sweep(const std::vector<std::string>& alpha, const std::vector<std::string>& beta,
                 const std::vector<std::string>& omega);

/// "alpha=N,F,P,R;beta=N;omega=N,F,V,M,Bavg,Bmdn"; omitted slots keep the full legal set.
Sweep parse_sweep(std::string_view symbols);

/// Per agent (SensorKind order): alpha x beta x omega, alpha outermost.
std::array<std::vector<AgentConfig>, kSensorCount> enumerate_configs(const Sweep& sweep);

struct TrainerConfig {
  neuroevo::NeatConfig beta_neat;
  neuroevo::NeatConfig omega_neat;
  fuzzyga::FgaConfig omega_fga;
  neuroevo::NeatConfig alpha_neat;
  fuzzyga::FgaConfig alpha_fga;
  double fixed_angle = 90.0;
  /// Used to derive alpha training targets.
  synthgen::Terrain terrain = synthgen::default_terrain();
};

/// Small budgets suited to the desk-scale study.
TrainerConfig default_trainer_config();

using OmegaModel = std::variant<NetGenome, FuzzySystem>;

struct TrainedAgent {
  AgentConfig config;
  NetGenome beta_model;
  std::optional<OmegaModel> omega_model;  // present iff omega is N or F
  AlphaPolicy alpha_policy;
};

/// Beta inputs for one agent: its own feature vector.
std::vector<TrainingRow> beta_rows(const Dataset& data, SensorKind sensor);

/// Angle in [0,180] (multiple of 15 degrees) that brings the sensing point
/// closest to the nearest IED; the target model-backed alpha policies learn.
double best_alpha_angle(const synthgen::Terrain& terrain, Position position);

/// Trains one beta network per sensor, Omega models per (sensor, N/F) and
/// alpha models per (sensor, N/F), sharing them across the configs that use
/// them. Every model's seed derives from `seed` and its role.
std::vector<TrainedAgent> train_agents(const Dataset& train, const std::vector<AgentConfig>& configs,
                                       const TrainerConfig& trainer, std::uint64_t seed);

/// Omega value of one agent given the five betas.
double omega_value(const TrainedAgent& agent, const fusion::BetaSet& betas);

struct LevelMetrics {
  double acc = 0.0;
  double rmse = 0.0;
  double auc = 0.0;
  metrics::RocCurve roc;
};

LevelMetrics level_metrics(const std::vector<double>& scores, const std::vector<bool>& truths);

struct AgentEvaluation {
  AgentConfig config;
  std::vector<double> beta_scores;
  std::vector<double> omega_scores;
  LevelMetrics beta;
  LevelMetrics omega;
};

struct Evaluation {
  std::vector<std::int64_t> sample_ids;
  std::vector<bool> truths;
  std::vector<AgentEvaluation> agents;
  /// Present when the agents are exactly one per sensor in SensorKind order.
  std::vector<fusion::SystemDecision> system;
};

/// Scores every sample with every agent. Beta values come from the agent of
/// each sensor; the first agent listed for a sensor supplies that sensor's beta.
Evaluation evaluate(const std::vector<TrainedAgent>& agents, const Dataset& data);

struct ConfigResult {
  AgentConfig config;
  LevelMetrics beta_train;
  LevelMetrics beta_validation;
  LevelMetrics omega_train;
  LevelMetrics omega_validation;
};

struct CaseResult {
  SplitCase split_case;
  std::uint64_t seed = 0;
  std::vector<ConfigResult> configs;
  /// Index into `configs` of each agent's best model (validation Omega ACC,
  /// then lower validation Omega RMSE, then config order).
  std::array<std::size_t, kSensorCount> best{};
  /// Index into `configs` of the lowest validation Omega AUC.
  std::size_t worst_omega = 0;
  /// Accuracy of the system decision (greatest Omega among the five best agents).
  double system_train_acc = 0.0;
  double system_validation_acc = 0.0;
};

struct StudyConfig {
  Sweep sweep;
  std::vector<SplitCase> cases{{SplitKind::C1, 550.0}, {SplitKind::C2, 550.0}, {SplitKind::C3, 550.0}};
  TrainerConfig trainer = default_trainer_config();
  std::vector<std::uint64_t> seeds{1};
  int jobs = 0;  // 0: hardware concurrency
};

/// Best config index per agent by the selection rule; stable under permutation of `configs`.
std::array<std::size_t, kSensorCount> select_best(const std::vector<ConfigResult>& configs);

/// One case and seed: split, train, evaluate on both sides, select.
CaseResult run_case(const Dataset& dataset, const SplitCase& split_case, const StudyConfig& config,
                    std::uint64_t seed);

/// Every case x seed, in that order (case outer). Units run on up to `jobs` threads.
std::vector<CaseResult> run_study(const Dataset& dataset, const StudyConfig& config);

/// Mean over the five agents of |train AUC - validation AUC| of each agent's best Omega model.
double best_omega_auc_gap(const CaseResult& result);

/// Writes summary_<case>.csv, auc_<case>.csv and roc/*.csv under out_dir.
void report(const std::vector<CaseResult>& results, const std::filesystem::path& out_dir);

/// Simulator-in-the-loop scan: at every position each agent aims its sensor
/// with its alpha policy (context: its previous features), acquires, and the
/// team produces betas, omegas and the system decision.
struct ScanStep {
  Position position;
  bool truth = false;
  std::array<double, kSensorCount> angles{};
  std::array<double, kSensorCount> betas{};
  std::array<double, kSensorCount> omegas{};
  fusion::SystemDecision decision;
};

std::vector<ScanStep> scan_in_the_loop(const std::array<TrainedAgent, kSensorCount>& team,
                                       const synthgen::GenConfig& world, const std::vector<Position>& path, int day,
                                       std::uint64_t seed);

}  // namespace cod2m::experiment
