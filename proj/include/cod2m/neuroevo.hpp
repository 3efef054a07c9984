#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "cod2m/models.hpp"
#include "cod2m/rng.hpp"

namespace cod2m {

/// One supervised example: inputs in [0,1] and a target in [0,1].
struct TrainingRow {
  std::vector<double> inputs;
  double target = 0.0;
};

}  // namespace cod2m

namespace cod2m::neuroevo {

struct CompatibilityCoeffs {
  double excess = 1.0;    // c1
  double disjoint = 1.0;  // c2
  double weight = 0.4;    // c3
};

struct NeatConfig {
  int population_size = 150;
  int generations = 100;
  double weight_mutate_rate = 0.8;
  double weight_perturb_sigma = 0.5;
  double weight_replace_rate = 0.1;  // per weight, when weights mutate
  double weight_limit = 30.0;
  double add_connection_rate = 0.1;
  double add_node_rate = 0.03;
  CompatibilityCoeffs compatibility;
  double compatibility_threshold = 3.0;
  double survival_fraction = 0.25;
  double crossover_rate = 0.75;
  int stagnation_limit = 15;
  std::vector<Activation> hidden_activations{Activation::Sigmoid, Activation::Tanh, Activation::Relu};
  std::uint64_t seed = 1;
};

void validate(const NeatConfig& cfg);

/// Hands out innovation numbers and hidden node ids. Within one generation
/// the same structural mutation always gets the same numbers.
class InnovationRegistry {
 public:
  /// Registry continuing after the minimal topology for this many inputs/outputs.
  InnovationRegistry(int input_count, int output_count);

  struct NodeSplit {
    int node_id;
    int in_innovation;   // from -> new node
    int out_innovation;  // new node -> to
  };

  int connection(int from, int to);
  NodeSplit split(int innovation);

  /// Forgets this generation's mutations; counters keep increasing.
  void next_generation();

  int next_innovation() const { return next_innovation_; }
  int next_node_id() const { return next_node_id_; }

 private:
  int next_innovation_;
  int next_node_id_;
  std::map<std::pair<int, int>, int> connections_;
  std::map<int, NodeSplit> splits_;
};

/// Node and innovation ids of the minimal topology (inputs + bias fully wired to outputs).
NetGenome minimal_genome(int input_count, int output_count);

std::vector<NetGenome> init_population(const NeatConfig& cfg, int input_count, int output_count, Rng& rng);

/// Weight perturbation, add-connection and add-node, each with its configured rate.
NetGenome mutate(const NetGenome& genome, const NeatConfig& cfg, InnovationRegistry& registry, Rng& rng);

/// Single operators, exposed for tests. They return false when nothing could be applied.
bool add_connection(NetGenome& genome, const NeatConfig& cfg, InnovationRegistry& registry, Rng& rng);
bool add_node(NetGenome& genome, const NeatConfig& cfg, InnovationRegistry& registry, Rng& rng);

/// Child with the fitter parent's structure; matching genes take either parent's weight.
NetGenome crossover(const NetGenome& fitter, const NetGenome& other, Rng& rng);

double compatibility(const NetGenome& a, const NetGenome& b, const CompatibilityCoeffs& coeffs);

/// -RMSE of the network over the rows.
double fitness(const NetGenome& genome, std::span<const TrainingRow> rows);

struct GenerationReport {
  int generation = 0;
  double best_fitness = 0.0;       // best in this generation
  double best_ever_fitness = 0.0;
  std::size_t species_count = 0;
  std::span<const NetGenome> population;
};

using GenerationObserver = std::function<void(const GenerationReport&)>;

struct EvolveResult {
  NetGenome best;
  double best_fitness = 0.0;
};

/// Generational NEAT loop; returns the best genome ever evaluated.
EvolveResult evolve(std::span<const TrainingRow> rows, const NeatConfig& cfg, int input_count,
                    const GenerationObserver& observer = {});

}  // namespace cod2m::neuroevo
