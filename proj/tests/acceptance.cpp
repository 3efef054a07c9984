// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cod2m/dataset.hpp"
#include "cod2m/error.hpp"
#include "cod2m/experiment.hpp"
#include "cod2m/fusion.hpp"
#include "cod2m/fuzzyga.hpp"
#include "cod2m/metrics.hpp"
#include "cod2m/neuroevo.hpp"
#include "cod2m/rng.hpp"
#include "cod2m/study_io.hpp"
#include "cod2m/serialize.hpp"
#include "cod2m/synthgen.hpp"
#include "support.hpp"

using namespace cod2m;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void verdict(int number, bool pass, const std::string& what, const std::string& detail) {
  std::printf("%s criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", number, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::span<const bool> as_span(const std::unique_ptr<bool[]>& p, std::size_t n) { return {p.get(), n}; }

// ---------------------------------------------------------------- criterion 1

void fusion_correctness() {
  const auto start = Clock::now();
  Rng rng(101);
  bool ok = true;
  for (int trial = 0; trial < 10000 && ok; ++trial) {
    std::array<double, kSensorCount> v{};
    for (auto& x : v) x = testsupport::random_unit(rng);
    const fusion::BetaSet b(v);
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    double sum = 0.0;
    for (const double x : v) sum += x;
    ok = fusion::aggregate(b, fusion::AggKind::Max) == sorted[4] &&
         fusion::aggregate(b, fusion::AggKind::Mdn) == sorted[2] &&
         fusion::aggregate(b, fusion::AggKind::Avg) == sum / 5.0;
  }
  int vote_matches = 0;
  for (unsigned pattern = 0; pattern < 32; ++pattern) {
    std::array<double, kSensorCount> v{};
    for (std::size_t i = 0; i < kSensorCount; ++i) v[i] = (pattern >> i) & 1U ? 0.5 : std::nextafter(0.5, 0.0);
    const int yes = std::popcount(pattern);
    vote_matches += fusion::vote(fusion::BetaSet(v)) == (yes >= 3 ? 1.0 : 0.0) ? 1 : 0;
  }
  const double elapsed = seconds_since(start);
  verdict(1, ok && vote_matches == 32 && elapsed < 1.0, "fusion operators match sort/mean/majority oracles",
          "10000 random sets " + std::string(ok ? "exact" : "MISMATCH") + ", vote " + std::to_string(vote_matches) +
              "/32, " + fmt(elapsed, 3) + " s");
}

// ---------------------------------------------------------------- criterion 2

void metrics_correctness() {
  Rng rng(202);
  bool counts_ok = true;
  for (int trial = 0; trial < 1000 && counts_ok; ++trial) {
    const std::size_t n = 2 + rng.below(60);
    std::vector<double> scores(n);
    auto truths = std::make_unique<bool[]>(n);
    truths[0] = true;
    truths[1] = false;
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = rng.chance(0.2) ? 0.5 : rng.uniform();
      if (i > 1) truths[i] = rng.chance(0.5);
    }
    std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool predicted = scores[i] >= 0.5;
      tp += predicted && truths[i];
      fp += predicted && !truths[i];
      tn += !predicted && !truths[i];
      fn += !predicted && truths[i];
    }
    const auto cm = metrics::confusion(scores, as_span(truths, n));
    const auto r = metrics::rates(cm);
    counts_ok = cm == metrics::ConfusionMatrix{tp, fp, tn, fn} &&
                r.tpr == static_cast<double>(tp) / static_cast<double>(tp + fn) &&
                r.fpr == static_cast<double>(fp) / static_cast<double>(fp + tn) &&
                r.acc == static_cast<double>(tp + tn) / static_cast<double>(n);
  }

  const std::vector<double> expected{1.0, 0.0};
  const std::vector<double> predicted{0.5, 0.5};
  const double hand_rmse = metrics::rmse(expected, predicted);

  const double diagonal = metrics::auc(metrics::RocCurve{{{0.0, 0.0}, {1.0, 1.0}}});
  const std::vector<double> flat(10, 0.3);
  auto flat_truths = std::make_unique<bool[]>(10);
  for (int i = 0; i < 10; ++i) flat_truths[i] = i % 2 == 0;
  const double tied = metrics::auc(metrics::roc(flat, as_span(flat_truths, 10)));

  const std::vector<double> separated{0.1, 0.2, 0.3, 0.7, 0.8, 0.9};
  auto sep_truths = std::make_unique<bool[]>(6);
  for (int i = 0; i < 6; ++i) sep_truths[i] = i >= 3;
  const double perfect = metrics::auc(metrics::roc(separated, as_span(sep_truths, 6)));

  int null_inside = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng r(derive_seed(2000, seed));
    const std::size_t n = 2000;
    std::vector<double> scores(n);
    auto truths = std::make_unique<bool[]>(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = r.uniform();
      truths[i] = r.chance(0.5);
    }
    const double a = metrics::auc(metrics::roc(scores, as_span(truths, n)));
    null_inside += a >= 0.45 && a <= 0.55 ? 1 : 0;
  }

  const bool pass = counts_ok && std::abs(hand_rmse - 0.5) <= 1e-12 && diagonal == 0.5 && tied == 0.5 &&
                    perfect == 1.0 && null_inside >= 95;
  verdict(2, pass, "confusion, RMSE and AUC match counting and hand oracles",
          std::string("1000 confusion cases ") + (counts_ok ? "exact" : "MISMATCH") + ", rmse " + fmt(hand_rmse, 15) +
              ", diagonal " + fmt(diagonal, 3) + ", tied " + fmt(tied, 3) + ", separator " + fmt(perfect, 3) +
              ", null AUC in [0.45,0.55] for " + std::to_string(null_inside) + "/100 seeds");
}

// ---------------------------------------------------------------- criterion 3

void neuroevolution() {
  const auto start = Clock::now();
  const std::vector<TrainingRow> xor_rows{{{0, 0}, 0}, {{0, 1}, 1}, {{1, 0}, 1}, {{1, 1}, 0}};
  int solved = 0;
  bool invariants = true;
  bool monotone = true;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    neuroevo::NeatConfig cfg;
    cfg.population_size = 150;
    cfg.generations = 150;
    cfg.seed = seed;
    double last_best = -1e300;
    const auto result = neuroevo::evolve(xor_rows, cfg, 2, [&](const neuroevo::GenerationReport& rep) {
      if (rep.best_ever_fitness < last_best || rep.best_ever_fitness < rep.best_fitness) monotone = false;
      last_best = rep.best_ever_fitness;
      for (const auto& g : rep.population) {
        try {
          validate(g);
        } catch (const ValidationError&) {
          invariants = false;
        }
      }
    });
    bool all_correct = true;
    for (const auto& row : xor_rows) {
      all_correct = all_correct && ((ann_forward(result.best, row.inputs) >= 0.5) == (row.target >= 0.5));
    }
    solved += all_correct ? 1 : 0;
  }
  const double elapsed = seconds_since(start);
  verdict(3, solved >= 8 && invariants && monotone && elapsed < 120.0, "NEAT solves XOR and keeps genome invariants",
          std::to_string(solved) + "/10 seeds solved, invariants " + (invariants ? "held" : "BROKEN") +
              ", best-ever fitness " + (monotone ? "monotone" : "NOT monotone") + ", " + fmt(elapsed, 1) + " s");
}

// ---------------------------------------------------------------- criterion 4

std::vector<std::uint16_t> genes_of(const fuzzyga::FuzzyChromosome& c) {
  std::vector<std::uint16_t> out(c.mf_genes);
  out.insert(out.end(), c.rule_genes.begin(), c.rule_genes.end());
  return out;
}

void fuzzy_ga() {
  std::vector<TrainingRow> rows;
  for (int i = 0; i <= 20; ++i) rows.push_back({{i / 20.0}, i / 20.0});

  // Feasibility witness: MFs peaking at 0, 0.5, 1 with consequents 0, 0.5, 1 reproduce y = x exactly.
  FuzzySystem witness;
  witness.input_count = 1;
  witness.mfs.push_back({TriangularMf{0, 0, 0.5}, TriangularMf{0, 0.5, 1}, TriangularMf{0.5, 1, 1}});
  witness.rules = {{{0}, 0.0}, {{1}, 0.5}, {{2}, 1.0}};
  const double witness_rmse = -fuzzyga::fitness(witness, rows);
  const double encoded_rmse = -fuzzyga::fitness(fuzzyga::decode(fuzzyga::encode(witness, 64)), rows);

  int fitted = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    fuzzyga::FgaConfig cfg;
    cfg.generations = 200;
    cfg.seed = seed;
    fitted += -fuzzyga::evolve(rows, cfg, 1).best_fitness <= 0.1 ? 1 : 0;
  }

  // Splice oracles on the deterministic operator forms.
  Rng rng(404);
  bool splices = true;
  for (int trial = 0; trial < 200 && splices; ++trial) {
    const int inputs = 1 + static_cast<int>(rng.below(3));
    const auto p1 = fuzzyga::random_chromosome(inputs, 64, rng);
    const auto p2 = fuzzyga::random_chromosome(inputs, 64, rng);
    const auto a = genes_of(p1);
    const auto b = genes_of(p2);
    const std::size_t n = a.size();
    const std::size_t mf = p1.mf_genes.size();

    const std::size_t cut = 1 + rng.below(n - 1);
    std::vector<std::uint16_t> want(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(cut));
    want.insert(want.end(), b.begin() + static_cast<std::ptrdiff_t>(cut), b.end());
    splices = splices && genes_of(fuzzyga::one_point(p1, p2, cut)) == want;

    std::vector<bool> mask(n);
    for (std::size_t i = 0; i < n; ++i) mask[i] = rng.chance(0.5);
    want.clear();
    for (std::size_t i = 0; i < n; ++i) want.push_back(mask[i] ? b[i] : a[i]);
    splices = splices && genes_of(fuzzyga::uniform(p1, p2, mask)) == want;

    const bool mfs_first = rng.chance(0.5);
    want.clear();
    for (std::size_t i = 0; i < n; ++i) want.push_back((i < mf) == mfs_first ? a[i] : b[i]);
    splices = splices && genes_of(fuzzyga::block_swap(p1, p2, mfs_first)) == want;

    std::size_t first = rng.below(n + 1);
    std::size_t last = rng.below(n + 1);
    if (first > last) std::swap(first, last);
    want.clear();
    for (std::size_t i = 0; i < n; ++i) want.push_back(i >= first && i < last ? b[i] : a[i]);
    splices = splices && genes_of(fuzzyga::two_point(p1, p2, first, last)) == want;
  }

  // X4 weight zero against the three-strategy baseline.
  fuzzyga::FgaConfig with_zero;
  with_zero.generations = 40;
  with_zero.crossover_weights = {0.5, 0.3, 0.2, 0.0};
  auto baseline = with_zero;
  baseline.crossover_weights = {0.5, 0.3, 0.2};
  bool reduces = true;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    with_zero.seed = baseline.seed = seed;
    const auto x = fuzzyga::evolve(rows, with_zero, 1);
    const auto y = fuzzyga::evolve(rows, baseline, 1);
    reduces = reduces && x.best_chromosome == y.best_chromosome && x.best_fitness == y.best_fitness;
  }

  verdict(4, fitted >= 8 && witness_rmse <= 1e-12 && encoded_rmse <= 0.1 && splices && reduces,
          "fuzzy GA fits the identity, crossovers splice correctly, X4 weight 0 is the baseline",
          std::to_string(fitted) + "/10 seeds reach RMSE <= 0.1, witness RMSE " + fmt(witness_rmse, 6) +
              " (64-level encoding " + fmt(encoded_rmse, 4) + "), splices " + (splices ? "exact" : "MISMATCH") +
              ", X4=0 " + (reduces ? "bit-identical" : "DIFFERS"));
}

// ---------------------------------------------------------------- criterion 5

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    files[fs::relative(e.path(), root).string()] = {std::istreambuf_iterator<char>(in), {}};
  }
  return files;
}

void determinism(const fs::path& scratch) {
  const auto data = synthgen::generate_dataset(synthgen::default_gen_config());
  experiment::StudyConfig cfg;
  cfg.seeds = {7};
  std::vector<std::map<std::string, std::string>> trees;
  for (const int jobs : {1, 3}) {
    cfg.jobs = jobs;
    const auto dir = scratch / ("determinism_" + std::to_string(jobs));
    fs::remove_all(dir);
    const auto results = experiment::run_study(data, cfg);
    fs::create_directories(dir);
    write_json_file(io::results_to_json(results), dir / "results.json");
    experiment::report(results, dir);
    trees.push_back(read_tree(dir));
  }
  verdict(5, trees[0] == trees[1] && !trees[0].empty(), "repeated study with the same seed is byte-identical",
          std::to_string(trees[0].size()) + " files compared, 1 vs 3 worker threads");
}

// ---------------------------------------------------------------- criteria 6 and 7

void headline(const fs::path& scratch) {
  const auto start = Clock::now();
  const auto data = synthgen::generate_dataset(synthgen::default_gen_config());
  experiment::StudyConfig cfg;
  cfg.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto results = experiment::run_study(data, cfg);
  const auto out = scratch / "headline";
  fs::remove_all(out);
  fs::create_directories(out);
  write_json_file(io::results_to_json(results), out / "results.json");
  experiment::report(results, out);

  std::map<std::uint64_t, std::map<SplitKind, const experiment::CaseResult*>> by_seed;
  for (const auto& r : results) by_seed[r.seed][r.split_case.kind] = &r;

  int c3_smallest = 0;
  int cooperative = 0;
  std::map<SplitKind, std::vector<double>> validation_aucs;
  std::string gaps;
  for (const auto& [seed, cases] : by_seed) {
    std::map<SplitKind, double> gap;
    bool coop = true;
    for (const auto& [kind, r] : cases) {
      gap[kind] = experiment::best_omega_auc_gap(*r);
      double best_omega = 0.0;
      for (const auto& c : r->configs) {
        validation_aucs[kind].push_back(c.omega_validation.auc);
        best_omega = std::max(best_omega, c.omega_validation.auc);
      }
      std::vector<double> beta;
      for (const auto idx : r->best) beta.push_back(r->configs[idx].beta_validation.auc);
      std::sort(beta.begin(), beta.end());
      coop = coop && best_omega >= beta[2];
    }
    const bool smallest = gap[SplitKind::C3] < gap[SplitKind::C1] && gap[SplitKind::C3] < gap[SplitKind::C2];
    c3_smallest += smallest ? 1 : 0;
    cooperative += coop ? 1 : 0;
  }
  std::map<SplitKind, double> mean;
  for (const auto& [kind, v] : validation_aucs) mean[kind] = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  const bool c1_lowest = mean[SplitKind::C1] < mean[SplitKind::C2] && mean[SplitKind::C1] < mean[SplitKind::C3];
  const double elapsed = seconds_since(start);

  verdict(6, c3_smallest >= 7 && c1_lowest && elapsed < 1800.0,
          "C3 has the most consistent train/validation AUC and C1 the worst validation AUC",
          "C3 smallest gap in " + std::to_string(c3_smallest) + "/10 seeds; mean validation Omega AUC C1 " +
              fmt(mean[SplitKind::C1]) + ", C2 " + fmt(mean[SplitKind::C2]) + ", C3 " + fmt(mean[SplitKind::C3]) +
              "; " + fmt(elapsed, 1) + " s");
  verdict(7, cooperative >= 8, "best Omega AUC reaches the median beta AUC on validation",
          std::to_string(cooperative) + "/10 seeds hold in every case");
}

// ---------------------------------------------------------------- criterion 8

void dataset_round_trip() {
  Rng rng(808);
  int identical = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = testsupport::random_dataset(rng);
    std::stringstream buf;
    write_dataset(d, buf);
    identical += read_dataset(buf) == d ? 1 : 0;
  }

  bool mirror = true;
  for (int trial = 0; trial < 50 && mirror; ++trial) {
    const auto d = testsupport::random_dataset(rng);
    const auto c1 = split(d, {SplitKind::C1});
    const auto c2 = split(d, {SplitKind::C2});
    mirror = c1.train == c2.validation && c1.validation == c2.train;
  }

  // Every positive below the region boundary: C3 validation would be single-class.
  DatasetHeader header;
  std::vector<Sample> samples;
  for (int i = 0; i < 8; ++i) {
    Sample s;
    s.id = i;
    s.condition.day = 1 + i % 2;
    s.position = {100.0, i < 4 ? 100.0 : 900.0};
    s.label = i < 2;
    for (auto& f : s.features) f.assign(4, 0.5);
    samples.push_back(s);
  }
  bool stratified = false;
  try {
    split(Dataset(header, samples), {SplitKind::C3, 550.0});
  } catch (const ValidationError&) {
    stratified = true;
  }

  verdict(8, identical == 100 && mirror && stratified, "dataset round-trip, C1/C2 mirror, C3 stratification",
          std::to_string(identical) + "/100 round-trips identical, mirror " + (mirror ? "holds" : "BROKEN") +
              ", single-class C3 side " + (stratified ? "rejected" : "ACCEPTED"));
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path scratch = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "cod2m_acceptance";
  fs::create_directories(scratch);
  fusion_correctness();
  metrics_correctness();
  neuroevolution();
  fuzzy_ga();
  determinism(scratch);
  headline(scratch);
  dataset_round_trip();
  std::printf("%s: %d criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
