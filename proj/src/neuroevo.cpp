#include "cod2m/neuroevo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "cod2m/error.hpp"
#include "cod2m/metrics.hpp"

namespace cod2m::neuroevo {

namespace {

bool rate(double r) { return r >= 0.0 && r <= 1.0; }

const NodeGene* find_node(const NetGenome& g, int id) {
  for (const auto& n : g.nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

// Is `target` reachable from `start` over all connection genes, enabled or not?
bool reachable(const NetGenome& g, int start, int target) {
  std::unordered_map<int, std::vector<int>> out;
  for (const auto& c : g.connections) out[c.from].push_back(c.to);
  std::vector<int> stack{start};
  std::unordered_set<int> seen{start};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    if (v == target) return true;
    for (const int w : out[v]) {
      if (seen.insert(w).second) stack.push_back(w);
    }
  }
  return false;
}

}  // namespace

void validate(const NeatConfig& cfg) {
  if (cfg.population_size < 2) throw ValidationError("NEAT population_size must be >= 2");
  if (cfg.generations < 0) throw ValidationError("NEAT generations must be >= 0");
  if (!rate(cfg.weight_mutate_rate) || !rate(cfg.weight_replace_rate) || !rate(cfg.add_connection_rate) ||
      !rate(cfg.add_node_rate) || !rate(cfg.survival_fraction) || !rate(cfg.crossover_rate)) {
    throw ValidationError("NEAT rates must be in [0,1]");
  }
  if (!(cfg.compatibility_threshold > 0.0)) throw ValidationError("NEAT compatibility threshold must be > 0");
  if (!(cfg.weight_perturb_sigma >= 0.0) || !(cfg.weight_limit > 0.0)) {
    throw ValidationError("NEAT weight sigma must be >= 0 and weight limit > 0");
  }
  if (cfg.hidden_activations.empty()) throw ValidationError("NEAT needs at least one hidden activation");
  if (cfg.stagnation_limit < 1) throw ValidationError("NEAT stagnation_limit must be >= 1");
}

InnovationRegistry::InnovationRegistry(int input_count, int output_count)
    : next_innovation_((input_count + 1) * output_count), next_node_id_(input_count + 1 + output_count) {}

int InnovationRegistry::connection(int from, int to) {
  const auto [it, inserted] = connections_.try_emplace({from, to}, next_innovation_);
  if (inserted) ++next_innovation_;
  return it->second;
}

InnovationRegistry::NodeSplit InnovationRegistry::split(int innovation) {
  const auto it = splits_.find(innovation);
  if (it != splits_.end()) return it->second;
  NodeSplit s{next_node_id_++, next_innovation_, next_innovation_ + 1};
  next_innovation_ += 2;
  splits_.emplace(innovation, s);
  return s;
}

void InnovationRegistry::next_generation() {
  connections_.clear();
  splits_.clear();
}

NetGenome minimal_genome(int input_count, int output_count) {
  NetGenome g;
  g.input_count = input_count;
  g.output_count = output_count;
  for (int i = 0; i < input_count; ++i) g.nodes.push_back({i, NodeRole::Input, Activation::Sigmoid});
  g.nodes.push_back({input_count, NodeRole::Bias, Activation::Sigmoid});
  for (int o = 0; o < output_count; ++o) {
    const int out_id = input_count + 1 + o;
    g.nodes.push_back({out_id, NodeRole::Output, Activation::Sigmoid});
    for (int src = 0; src <= input_count; ++src) {
      g.connections.push_back({o * (input_count + 1) + src, src, out_id, 0.0, true});
    }
  }
  return g;
}

std::vector<NetGenome> init_population(const NeatConfig& cfg, int input_count, int output_count, Rng& rng) {
  validate(cfg);
  if (input_count < 1 || output_count < 1) throw ValidationError("NEAT needs >= 1 input and output");
  const auto base = minimal_genome(input_count, output_count);
  std::vector<NetGenome> pop(static_cast<std::size_t>(cfg.population_size), base);
  for (auto& g : pop) {
    for (auto& c : g.connections) c.weight = rng.uniform(-1.0, 1.0);
  }
  return pop;
}

bool add_connection(NetGenome& g, const NeatConfig&, InnovationRegistry& registry, Rng& rng) {
  std::set<std::pair<int, int>> existing;
  for (const auto& c : g.connections) existing.insert({c.from, c.to});

  std::vector<std::pair<int, int>> candidates;
  for (const auto& from : g.nodes) {
    if (from.role == NodeRole::Output) continue;
    for (const auto& to : g.nodes) {
      if (to.role == NodeRole::Input || to.role == NodeRole::Bias || to.id == from.id) continue;
      if (existing.contains({from.id, to.id})) continue;
      // The new edge closes a cycle iff `from` is already reachable from `to`.
      if (reachable(g, to.id, from.id)) continue;
      candidates.emplace_back(from.id, to.id);
    }
  }
  if (candidates.empty()) return false;
  const auto [from, to] = candidates[rng.below(candidates.size())];
  g.connections.push_back({registry.connection(from, to), from, to, rng.uniform(-1.0, 1.0), true});
  return true;
}

bool add_node(NetGenome& g, const NeatConfig& cfg, InnovationRegistry& registry, Rng& rng) {
  std::vector<std::size_t> enabled;
  for (std::size_t i = 0; i < g.connections.size(); ++i) {
    if (g.connections[i].enabled) enabled.push_back(i);
  }
  if (enabled.empty()) return false;
  const auto idx = enabled[rng.below(enabled.size())];
  const auto activation = cfg.hidden_activations[rng.below(cfg.hidden_activations.size())];
  const auto old = g.connections[idx];
  const auto s = registry.split(old.innovation);
  if (find_node(g, s.node_id) != nullptr) return false;
  for (const auto& c : g.connections) {
    if (c.innovation == s.in_innovation || c.innovation == s.out_innovation) return false;
  }
  g.connections[idx].enabled = false;
  g.nodes.push_back({s.node_id, NodeRole::Hidden, activation});
  g.connections.push_back({s.in_innovation, old.from, s.node_id, 1.0, true});
  g.connections.push_back({s.out_innovation, s.node_id, old.to, old.weight, true});
  return true;
}

NetGenome mutate(const NetGenome& genome, const NeatConfig& cfg, InnovationRegistry& registry, Rng& rng) {
  NetGenome g = genome;
  if (rng.chance(cfg.weight_mutate_rate)) {
    for (auto& c : g.connections) {
      if (rng.chance(cfg.weight_replace_rate)) {
        c.weight = rng.uniform(-1.0, 1.0);
      } else {
        c.weight = std::clamp(c.weight + rng.normal(0.0, cfg.weight_perturb_sigma), -cfg.weight_limit, cfg.weight_limit);
      }
    }
  }
  if (rng.chance(cfg.add_connection_rate)) add_connection(g, cfg, registry, rng);
  if (rng.chance(cfg.add_node_rate)) add_node(g, cfg, registry, rng);
  return g;
}

NetGenome crossover(const NetGenome& fitter, const NetGenome& other, Rng& rng) {
  std::unordered_map<int, const ConnectionGene*> other_genes;
  for (const auto& c : other.connections) other_genes.emplace(c.innovation, &c);

  NetGenome child = fitter;
  for (auto& gene : child.connections) {
    const auto it = other_genes.find(gene.innovation);
    if (it == other_genes.end()) continue;
    const auto& mate = *it->second;
    if (rng.chance(0.5)) gene.weight = mate.weight;
    if (gene.enabled != mate.enabled) gene.enabled = !rng.chance(0.75);
  }
  return child;
}

double compatibility(const NetGenome& a, const NetGenome& b, const CompatibilityCoeffs& k) {
  std::map<int, double> wa;
  std::map<int, double> wb;
  for (const auto& c : a.connections) wa.emplace(c.innovation, c.weight);
  for (const auto& c : b.connections) wb.emplace(c.innovation, c.weight);
  if (wa.empty() && wb.empty()) return 0.0;

  const int max_a = wa.empty() ? std::numeric_limits<int>::min() : wa.rbegin()->first;
  const int max_b = wb.empty() ? std::numeric_limits<int>::min() : wb.rbegin()->first;
  const int horizon = std::min(max_a, max_b);

  double excess = 0.0;
  double disjoint = 0.0;
  double weight_diff = 0.0;
  double matching = 0.0;
  const auto tally = [&](const std::map<int, double>& mine, const std::map<int, double>& theirs) {
    for (const auto& [innov, w] : mine) {
      if (theirs.contains(innov)) continue;
      (innov > horizon ? excess : disjoint) += 1.0;
    }
  };
  tally(wa, wb);
  tally(wb, wa);
  for (const auto& [innov, w] : wa) {
    const auto it = wb.find(innov);
    if (it == wb.end()) continue;
    weight_diff += std::abs(w - it->second);
    matching += 1.0;
  }
  const auto size = std::max(wa.size(), wb.size());
  const double n = size < 20 ? 1.0 : static_cast<double>(size);
  const double mean_diff = matching > 0.0 ? weight_diff / matching : 0.0;
  return k.excess * excess / n + k.disjoint * disjoint / n + k.weight * mean_diff;
}

double fitness(const NetGenome& genome, std::span<const TrainingRow> rows) {
  const CompiledNet net(genome);
  std::vector<double> scratch;
  std::vector<double> expected;
  std::vector<double> predicted;
  expected.reserve(rows.size());
  predicted.reserve(rows.size());
  for (const auto& row : rows) {
    expected.push_back(row.target);
    predicted.push_back(net(row.inputs, scratch));
  }
  return -metrics::rmse(expected, predicted);
}

namespace {

struct Species {
  NetGenome representative;
  std::vector<std::size_t> members;
  double best_fitness = -std::numeric_limits<double>::infinity();
  int staleness = 0;
};

// Splits `total` proportionally to `shares` with largest-remainder rounding.
std::vector<int> apportion(const std::vector<double>& shares, int total) {
  std::vector<int> out(shares.size(), 0);
  const double sum = std::accumulate(shares.begin(), shares.end(), 0.0);
  if (shares.empty() || total <= 0) return out;
  std::vector<double> exact(shares.size());
  for (std::size_t i = 0; i < shares.size(); ++i) {
    exact[i] = sum > 0.0 ? shares[i] / sum * total : static_cast<double>(total) / static_cast<double>(shares.size());
  }
  int assigned = 0;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    out[i] = static_cast<int>(std::floor(exact[i]));
    assigned += out[i];
  }
  std::vector<std::size_t> order(shares.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return exact[l] - std::floor(exact[l]) > exact[r] - std::floor(exact[r]);
  });
  for (std::size_t k = 0; assigned < total; k = (k + 1) % order.size()) {
    ++out[order[k]];
    ++assigned;
  }
  return out;
}

}  // namespace

EvolveResult evolve(std::span<const TrainingRow> rows, const NeatConfig& cfg, int input_count,
                    const GenerationObserver& observer) {
  validate(cfg);
  if (rows.empty()) throw ValidationError("NEAT training set is empty");
  for (const auto& row : rows) {
    if (row.inputs.size() != static_cast<std::size_t>(input_count)) {
      throw ValidationError("training row arity differs from input_count");
    }
    if (!(row.target >= 0.0 && row.target <= 1.0)) throw ValidationError("training targets must be in [0,1]");
  }

  Rng rng(cfg.seed);
  InnovationRegistry registry(input_count, 1);
  auto population = init_population(cfg, input_count, 1, rng);
  std::vector<double> fit(population.size());

  EvolveResult best;
  best.best_fitness = -std::numeric_limits<double>::infinity();
  std::vector<Species> species;

  for (int gen = 0;; ++gen) {
    for (std::size_t i = 0; i < population.size(); ++i) fit[i] = fitness(population[i], rows);
    const auto champion = static_cast<std::size_t>(std::max_element(fit.begin(), fit.end()) - fit.begin());
    if (fit[champion] > best.best_fitness) {
      best.best_fitness = fit[champion];
      best.best = population[champion];
    }

    // Speciate against last generation's representatives.
    for (auto& s : species) s.members.clear();
    for (std::size_t i = 0; i < population.size(); ++i) {
      bool placed = false;
      for (auto& s : species) {
        if (compatibility(population[i], s.representative, cfg.compatibility) < cfg.compatibility_threshold) {
          s.members.push_back(i);
          placed = true;
          break;
        }
      }
      if (!placed) species.push_back({population[i], {i}, -std::numeric_limits<double>::infinity(), 0});
    }
    std::erase_if(species, [](const Species& s) { return s.members.empty(); });
    for (auto& s : species) {
      double top = -std::numeric_limits<double>::infinity();
      for (const auto m : s.members) top = std::max(top, fit[m]);
      if (top > s.best_fitness) {
        s.best_fitness = top;
        s.staleness = 0;
      } else {
        ++s.staleness;
      }
    }

    if (observer) observer({gen, fit[champion], best.best_fitness, species.size(), population});
    if (gen >= cfg.generations) break;

    // Offspring shares: mean of (1 - RMSE) within each species (explicit fitness sharing).
    std::vector<double> shares(species.size(), 0.0);
    std::size_t champion_species = 0;
    for (std::size_t s = 0; s < species.size(); ++s) {
      const auto& sp = species[s];
      if (std::find(sp.members.begin(), sp.members.end(), champion) != sp.members.end()) champion_species = s;
    }
    for (std::size_t s = 0; s < species.size(); ++s) {
      const auto& sp = species[s];
      if (sp.staleness >= cfg.stagnation_limit && s != champion_species) continue;
      double total = 0.0;
      for (const auto m : sp.members) total += 1.0 + fit[m];
      shares[s] = total / static_cast<double>(sp.members.size());
    }
    auto offspring = apportion(shares, cfg.population_size);
    if (offspring[champion_species] == 0) {
      // The champion's species always keeps its elite.
      const auto donor = static_cast<std::size_t>(std::max_element(offspring.begin(), offspring.end()) - offspring.begin());
      --offspring[donor];
      offspring[champion_species] = 1;
    }

    registry.next_generation();
    std::vector<NetGenome> next;
    next.reserve(population.size());
    for (std::size_t s = 0; s < species.size(); ++s) {
      auto members = species[s].members;
      std::stable_sort(members.begin(), members.end(), [&](std::size_t l, std::size_t r) { return fit[l] > fit[r]; });
      const int count = offspring[s];
      if (count <= 0) continue;
      next.push_back(population[members.front()]);
      const auto survivors = std::max<std::size_t>(
          1, static_cast<std::size_t>(std::ceil(cfg.survival_fraction * static_cast<double>(members.size()))));
      for (int k = 1; k < count; ++k) {
        if (survivors >= 2 && rng.chance(cfg.crossover_rate)) {
          auto p1 = rng.below(survivors);
          auto p2 = rng.below(survivors - 1);
          if (p2 >= p1) ++p2;
          // members is sorted best-first, so the lower rank is the fitter parent.
          if (p2 < p1) std::swap(p1, p2);
          auto child = crossover(population[members[p1]], population[members[p2]], rng);
          next.push_back(mutate(child, cfg, registry, rng));
        } else {
          next.push_back(mutate(population[members[rng.below(survivors)]], cfg, registry, rng));
        }
      }
    }

    // New representatives: a random member of each species from this generation.
    // Species without offspring go extinct.
    std::vector<Species> alive;
    for (std::size_t s = 0; s < species.size(); ++s) {
      auto& sp = species[s];
      sp.representative = population[sp.members[rng.below(sp.members.size())]];
      if (offspring[s] > 0) alive.push_back(std::move(sp));
    }
    species = std::move(alive);
    population = std::move(next);
    fit.assign(population.size(), 0.0);
  }
  return best;
}

}  // namespace cod2m::neuroevo
