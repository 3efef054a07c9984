#include "cod2m/fuzzyga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>

#include "cod2m/error.hpp"
#include "cod2m/metrics.hpp"

namespace cod2m::fuzzyga {

namespace {

constexpr std::size_t kGenesPerMf = 3;
constexpr std::size_t kMfGenesPerInput = kMfsPerInput * kGenesPerMf;

bool rate(double r) { return r >= 0.0 && r <= 1.0; }

void require_same_shape(const FuzzyChromosome& p1, const FuzzyChromosome& p2) {
  if (p1.input_count != p2.input_count || p1.levels != p2.levels || p1.mf_genes.size() != p2.mf_genes.size() ||
      p1.rule_genes.size() != p2.rule_genes.size()) {
    throw ValidationError("crossover parents differ in shape");
  }
}

// Span on which an MF is positive: (a, c), widened to infinity on a shoulder side.
std::pair<double, double> support(const TriangularMf& mf) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {mf.a == mf.b ? -inf : mf.a, mf.b == mf.c ? inf : mf.c};
}

bool covered(const std::array<TriangularMf, kMfsPerInput>& mfs, double x) {
  for (const auto& mf : mfs) {
    const auto [lo, hi] = support(mf);
    if (lo < x && x < hi) return true;
  }
  return false;
}

}  // namespace

std::uint16_t FuzzyChromosome::gene(std::size_t i) const {
  return i < mf_genes.size() ? mf_genes[i] : rule_genes[i - mf_genes.size()];
}

void FuzzyChromosome::set_gene(std::size_t i, std::uint16_t level) {
  if (i < mf_genes.size()) {
    mf_genes[i] = level;
  } else {
    rule_genes[i - mf_genes.size()] = level;
  }
}

std::size_t rule_count(int input_count) {
  std::size_t n = 1;
  for (int i = 0; i < input_count; ++i) n *= kMfsPerInput;
  return n;
}

FuzzyChromosome random_chromosome(int input_count, int levels, Rng& rng) {
  FuzzyChromosome c;
  c.input_count = input_count;
  c.levels = levels;
  c.mf_genes.resize(static_cast<std::size_t>(input_count) * kMfGenesPerInput);
  c.rule_genes.resize(rule_count(input_count));
  for (auto& g : c.mf_genes) g = static_cast<std::uint16_t>(rng.below(static_cast<std::uint64_t>(levels)));
  for (auto& g : c.rule_genes) g = static_cast<std::uint16_t>(rng.below(static_cast<std::uint64_t>(levels)));
  return c;
}

void validate(const FuzzyChromosome& c) {
  if (c.input_count < 1) throw ValidationError("chromosome needs at least one input");
  if (c.levels < 2 || c.levels > 65536) throw ValidationError("chromosome levels out of range");
  if (c.mf_genes.size() != static_cast<std::size_t>(c.input_count) * kMfGenesPerInput ||
      c.rule_genes.size() != rule_count(c.input_count)) {
    throw ValidationError("chromosome gene counts do not match its input count");
  }
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.gene(i) >= c.levels) throw ValidationError("gene " + std::to_string(i) + " level out of range");
  }
}

void repair_coverage(std::array<TriangularMf, kMfsPerInput>& mfs) {
  std::array<std::size_t, kMfsPerInput> order{0, 1, 2};
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return std::tie(mfs[l].b, mfs[l].a, mfs[l].c) < std::tie(mfs[r].b, mfs[r].a, mfs[r].c);
  });
  if (!covered(mfs, 0.0)) mfs[order.front()].a = mfs[order.front()].b;
  if (!covered(mfs, 1.0)) mfs[order.back()].c = mfs[order.back()].b;

  // Sweep left to right; bridge each gap by stretching the MF that ends just before it
  // to the peak of the next MF that starts after it.
  double need = 0.0;
  while (need <= 1.0) {
    double reach = -std::numeric_limits<double>::infinity();
    for (const auto& mf : mfs) {
      const auto [lo, hi] = support(mf);
      if (lo < need && need < hi) reach = std::max(reach, hi);
    }
    if (reach > need) {
      need = reach;
      continue;
    }
    std::size_t left = kMfsPerInput;
    std::size_t right = kMfsPerInput;
    for (std::size_t k = 0; k < kMfsPerInput; ++k) {
      const auto [lo, hi] = support(mfs[k]);
      if (hi <= need && (left == kMfsPerInput || hi > support(mfs[left]).second)) left = k;
      if (lo >= need && (right == kMfsPerInput || lo < support(mfs[right]).first)) right = k;
    }
    if (left == kMfsPerInput) {
      // Only reachable at the left boundary, which the shoulder step above already fixed.
      mfs[order.front()].a = mfs[order.front()].b;
    } else if (right == kMfsPerInput) {
      mfs[left].c = mfs[left].b;
    } else {
      mfs[left].c = mfs[right].b;
    }
  }
}

FuzzySystem decode(const FuzzyChromosome& c) {
  validate(c);
  const double scale = 1.0 / static_cast<double>(c.levels - 1);
  FuzzySystem fs;
  fs.input_count = c.input_count;
  fs.mfs.resize(static_cast<std::size_t>(c.input_count));
  for (std::size_t i = 0; i < fs.mfs.size(); ++i) {
    for (std::size_t k = 0; k < kMfsPerInput; ++k) {
      std::array<std::uint16_t, kGenesPerMf> v{};
      for (std::size_t j = 0; j < kGenesPerMf; ++j) v[j] = c.mf_genes[i * kMfGenesPerInput + k * kGenesPerMf + j];
      std::sort(v.begin(), v.end());
      fs.mfs[i][k] = {v[0] * scale, v[1] * scale, v[2] * scale};
    }
    repair_coverage(fs.mfs[i]);
  }
  fs.rules.resize(c.rule_genes.size());
  for (std::size_t r = 0; r < fs.rules.size(); ++r) {
    auto& rule = fs.rules[r];
    rule.antecedent.resize(static_cast<std::size_t>(c.input_count));
    std::size_t code = r;
    for (auto& idx : rule.antecedent) {
      idx = static_cast<std::uint8_t>(code % kMfsPerInput);
      code /= kMfsPerInput;
    }
    rule.consequent = c.rule_genes[r] * scale;
  }
  return fs;
}

FuzzyChromosome encode(const FuzzySystem& fs, int levels) {
  validate(fs);
  const auto to_level = [levels](double v) {
    return static_cast<std::uint16_t>(std::lround(std::clamp(v, 0.0, 1.0) * (levels - 1)));
  };
  FuzzyChromosome c;
  c.input_count = fs.input_count;
  c.levels = levels;
  for (const auto& triple : fs.mfs) {
    for (const auto& mf : triple) {
      c.mf_genes.push_back(to_level(mf.a));
      c.mf_genes.push_back(to_level(mf.b));
      c.mf_genes.push_back(to_level(mf.c));
    }
  }
  if (fs.rules.size() != rule_count(fs.input_count)) {
    throw ValidationError("only complete-grid fuzzy systems can be encoded");
  }
  for (std::size_t r = 0; r < fs.rules.size(); ++r) {
    std::size_t code = r;
    for (const auto idx : fs.rules[r].antecedent) {
      if (idx != code % kMfsPerInput) throw ValidationError("rules must follow the canonical grid order");
      code /= kMfsPerInput;
    }
    c.rule_genes.push_back(to_level(fs.rules[r].consequent));
  }
  validate(c);
  return c;
}

void validate(const FgaConfig& cfg) {
  if (cfg.population_size < 2) throw ValidationError("FGA population_size must be >= 2");
  if (cfg.generations < 0) throw ValidationError("FGA generations must be >= 0");
  if (!rate(cfg.vertex_shift_rate) || !rate(cfg.consequent_reset_rate)) {
    throw ValidationError("FGA mutation rates must be in [0,1]");
  }
  if (cfg.crossover_weights.size() != 3 && cfg.crossover_weights.size() != 4) {
    throw ValidationError("FGA crossover_weights needs 3 or 4 entries");
  }
  double sum = 0.0;
  for (const double w : cfg.crossover_weights) {
    if (!(w >= 0.0)) throw ValidationError("FGA crossover weights must be non-negative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ValidationError("FGA crossover weights must sum to 1");
  if (cfg.tournament_size < 1) throw ValidationError("FGA tournament_size must be >= 1");
  if (cfg.elitism < 0 || cfg.elitism > cfg.population_size) throw ValidationError("FGA elitism out of range");
  if (cfg.levels < 8 || cfg.levels > 65536) throw ValidationError("FGA quantization levels must be >= 8");
}

void shift_vertex(FuzzyChromosome& c, std::size_t mf_gene, int direction) {
  const int level = std::clamp(static_cast<int>(c.mf_genes.at(mf_gene)) + direction, 0, c.levels - 1);
  c.mf_genes[mf_gene] = static_cast<std::uint16_t>(level);
}

FuzzyChromosome mutate(const FuzzyChromosome& chrom, const FgaConfig& cfg, Rng& rng) {
  FuzzyChromosome c = chrom;
  if (rng.chance(cfg.vertex_shift_rate)) {
    const auto gene = rng.below(c.mf_genes.size());
    shift_vertex(c, gene, rng.chance(0.5) ? 1 : -1);
  }
  if (rng.chance(cfg.consequent_reset_rate)) {
    const auto gene = rng.below(c.rule_genes.size());
    c.rule_genes[gene] = static_cast<std::uint16_t>(rng.below(static_cast<std::uint64_t>(c.levels)));
  }
  return c;
}

FuzzyChromosome one_point(const FuzzyChromosome& p1, const FuzzyChromosome& p2, std::size_t cut) {
  return two_point(p1, p2, cut, p1.size());
}

FuzzyChromosome two_point(const FuzzyChromosome& p1, const FuzzyChromosome& p2, std::size_t first, std::size_t last) {
  require_same_shape(p1, p2);
  if (first > last || last > p1.size()) throw ValidationError("crossover cut points out of range");
  FuzzyChromosome child = p1;
  for (auto i = first; i < last; ++i) child.set_gene(i, p2.gene(i));
  return child;
}

FuzzyChromosome uniform(const FuzzyChromosome& p1, const FuzzyChromosome& p2, const std::vector<bool>& from_second) {
  require_same_shape(p1, p2);
  if (from_second.size() != p1.size()) throw ValidationError("uniform crossover mask has the wrong length");
  FuzzyChromosome child = p1;
  for (std::size_t i = 0; i < from_second.size(); ++i) {
    if (from_second[i]) child.set_gene(i, p2.gene(i));
  }
  return child;
}

FuzzyChromosome block_swap(const FuzzyChromosome& p1, const FuzzyChromosome& p2, bool mfs_from_first) {
  require_same_shape(p1, p2);
  FuzzyChromosome child = mfs_from_first ? p1 : p2;
  child.rule_genes = mfs_from_first ? p2.rule_genes : p1.rule_genes;
  return child;
}

FuzzyChromosome crossover(const FuzzyChromosome& p1, const FuzzyChromosome& p2, CrossoverKind kind, Rng& rng) {
  require_same_shape(p1, p2);
  const auto n = p1.size();
  switch (kind) {
    case CrossoverKind::OnePoint:
      return one_point(p1, p2, 1 + static_cast<std::size_t>(rng.below(n - 1)));
    case CrossoverKind::Uniform: {
      std::vector<bool> mask(n);
      for (std::size_t i = 0; i < n; ++i) mask[i] = rng.chance(0.5);
      return uniform(p1, p2, mask);
    }
    case CrossoverKind::BlockSwap:
      return block_swap(p1, p2, rng.chance(0.5));
    case CrossoverKind::TwoPoint: {
      auto first = static_cast<std::size_t>(rng.below(n));
      auto last = static_cast<std::size_t>(rng.below(n));
      if (first > last) std::swap(first, last);
      return two_point(p1, p2, first, last + 1);
    }
  }
  throw ValidationError("unknown crossover strategy");
}

CrossoverKind pick_strategy(std::span<const double> weights, double u) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last_positive = i;
    acc += weights[i];
    if (u * total < acc) return static_cast<CrossoverKind>(i);
  }
  return static_cast<CrossoverKind>(last_positive);
}

double fitness(const FuzzySystem& fs, std::span<const TrainingRow> rows) {
  std::vector<double> expected;
  std::vector<double> predicted;
  expected.reserve(rows.size());
  predicted.reserve(rows.size());
  for (const auto& row : rows) {
    expected.push_back(row.target);
    predicted.push_back(fuzzy_infer(fs, row.inputs));
  }
  return -metrics::rmse(expected, predicted);
}

EvolveResult evolve(std::span<const TrainingRow> rows, const FgaConfig& cfg, int input_count,
                    const GenerationObserver& observer) {
  validate(cfg);
  if (rows.empty()) throw ValidationError("FGA training set is empty");
  if (input_count < 1) throw ValidationError("FGA needs at least one input");
  for (const auto& row : rows) {
    if (row.inputs.size() != static_cast<std::size_t>(input_count)) {
      throw ValidationError("training row arity differs from input_count");
    }
    for (const double x : row.inputs) {
      if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("FGA inputs must be in [0,1]");
    }
    if (!(row.target >= 0.0 && row.target <= 1.0)) throw ValidationError("training targets must be in [0,1]");
  }

  Rng rng(cfg.seed);
  std::vector<FuzzyChromosome> population;
  population.reserve(static_cast<std::size_t>(cfg.population_size));
  for (int i = 0; i < cfg.population_size; ++i) population.push_back(random_chromosome(input_count, cfg.levels, rng));

  EvolveResult best;
  best.best_fitness = -std::numeric_limits<double>::infinity();
  std::vector<double> fit(population.size());

  for (int gen = 0;; ++gen) {
    for (std::size_t i = 0; i < population.size(); ++i) fit[i] = fitness(decode(population[i]), rows);
    std::vector<std::size_t> rank(population.size());
    std::iota(rank.begin(), rank.end(), 0);
    std::stable_sort(rank.begin(), rank.end(), [&](std::size_t l, std::size_t r) { return fit[l] > fit[r]; });
    if (fit[rank.front()] > best.best_fitness) {
      best.best_fitness = fit[rank.front()];
      best.best_chromosome = population[rank.front()];
    }
    if (observer) observer({gen, fit[rank.front()], best.best_fitness, population});
    if (gen >= cfg.generations) break;

    const auto tournament = [&]() -> const FuzzyChromosome& {
      auto winner = static_cast<std::size_t>(rng.below(population.size()));
      for (int k = 1; k < cfg.tournament_size; ++k) {
        const auto challenger = static_cast<std::size_t>(rng.below(population.size()));
        if (fit[challenger] > fit[winner]) winner = challenger;
      }
      return population[winner];
    };

    std::vector<FuzzyChromosome> next;
    next.reserve(population.size());
    for (int e = 0; e < cfg.elitism; ++e) next.push_back(population[rank[static_cast<std::size_t>(e)]]);
    while (next.size() < population.size()) {
      const auto& p1 = tournament();
      const auto& p2 = tournament();
      const auto kind = pick_strategy(cfg.crossover_weights, rng.uniform());
      next.push_back(mutate(crossover(p1, p2, kind, rng), cfg, rng));
    }
    population = std::move(next);
  }
  best.best = decode(best.best_chromosome);
  return best;
}

}  // namespace cod2m::fuzzyga
