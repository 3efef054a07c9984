#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cod2m/models.hpp"
#include "cod2m/neuroevo.hpp"
#include "cod2m/rng.hpp"

namespace cod2m::fuzzyga {

/// Discrete encoding of a complete-grid fuzzy system.
///
/// mf_genes holds, per input, three MFs of three vertex levels each
/// (input-major, then MF, then vertex). rule_genes holds one consequent level
/// per rule of the 3^inputs grid, rule r using MF (r / 3^i) % 3 on input i.
/// Every level lies in [0, levels).
struct FuzzyChromosome {
  int input_count = 0;
  int levels = 64;
  std::vector<std::uint16_t> mf_genes;
  std::vector<std::uint16_t> rule_genes;

  std::size_t size() const { return mf_genes.size() + rule_genes.size(); }
  std::uint16_t gene(std::size_t i) const;
  void set_gene(std::size_t i, std::uint16_t level);

  bool operator==(const FuzzyChromosome&) const = default;
};

std::size_t rule_count(int input_count);

/// Random chromosome with uniform levels.
FuzzyChromosome random_chromosome(int input_count, int levels, Rng& rng);

void validate(const FuzzyChromosome& chrom);

/// Levels map to q/(levels-1); each MF's vertices are sorted into (a,b,c);
/// gaps in [0,1] coverage are repaired by stretching the nearest MF.
FuzzySystem decode(const FuzzyChromosome& chrom);

/// Nearest-level encoding of a complete-grid fuzzy system.
FuzzyChromosome encode(const FuzzySystem& fs, int levels);

/// Extends MF outer vertices until the triple covers [0,1]. Vertices only
/// move onto other vertices of the same triple, so grid values stay on the grid.
void repair_coverage(std::array<TriangularMf, kMfsPerInput>& mfs);

enum class CrossoverKind : std::uint8_t { OnePoint = 0, Uniform = 1, BlockSwap = 2, TwoPoint = 3 };

struct FgaConfig {
  int population_size = 60;
  int generations = 100;
  double vertex_shift_rate = 0.9;     // M1
  double consequent_reset_rate = 0.5; // M2
  /// Selection weights for X1..X4. Three entries run the baseline without the two-point crossover.
  std::vector<double> crossover_weights{0.25, 0.25, 0.25, 0.25};
  int tournament_size = 3;
  int elitism = 2;
  int levels = 64;
  std::uint64_t seed = 1;
};

void validate(const FgaConfig& cfg);

/// M1: move one vertex gene by `direction` levels, clamped to the level range.
void shift_vertex(FuzzyChromosome& chrom, std::size_t mf_gene, int direction);

/// Applies M1 and M2, each with its configured probability.
FuzzyChromosome mutate(const FuzzyChromosome& chrom, const FgaConfig& cfg, Rng& rng);

/// Deterministic operator forms over the flattened gene string (mf_genes then rule_genes).
FuzzyChromosome one_point(const FuzzyChromosome& p1, const FuzzyChromosome& p2, std::size_t cut);
FuzzyChromosome two_point(const FuzzyChromosome& p1, const FuzzyChromosome& p2, std::size_t first, std::size_t last);
FuzzyChromosome uniform(const FuzzyChromosome& p1, const FuzzyChromosome& p2, const std::vector<bool>& from_second);
FuzzyChromosome block_swap(const FuzzyChromosome& p1, const FuzzyChromosome& p2, bool mfs_from_first);

/// Random-cut form of the chosen strategy. Throws ValidationError on shape mismatch.
FuzzyChromosome crossover(const FuzzyChromosome& p1, const FuzzyChromosome& p2, CrossoverKind kind, Rng& rng);

/// Roulette pick over the configured weights from a single uniform draw.
CrossoverKind pick_strategy(std::span<const double> weights, double u);

double fitness(const FuzzySystem& fs, std::span<const TrainingRow> rows);

struct GenerationReport {
  int generation = 0;
  double best_fitness = 0.0;
  double best_ever_fitness = 0.0;
  std::span<const FuzzyChromosome> population;
};

using GenerationObserver = std::function<void(const GenerationReport&)>;

struct EvolveResult {
  FuzzySystem best;
  FuzzyChromosome best_chromosome;
  double best_fitness = 0.0;
};

/// Tournament selection, strategy-weighted crossover, both mutations, elitism.
EvolveResult evolve(std::span<const TrainingRow> rows, const FgaConfig& cfg, int input_count,
                    const GenerationObserver& observer = {});

}  // namespace cod2m::fuzzyga
