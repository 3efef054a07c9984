#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "cod2m/rng.hpp"

namespace cod2m {

enum class NodeRole : std::uint8_t { Input, Hidden, Output, Bias };
enum class Activation : std::uint8_t { Sigmoid, Tanh, Relu };

struct NodeGene {
  int id = 0;
  NodeRole role = NodeRole::Input;
  Activation activation = Activation::Sigmoid;

  bool operator==(const NodeGene&) const = default;
};

struct ConnectionGene {
  int innovation = 0;
  int from = 0;
  int to = 0;
  double weight = 0.0;
  bool enabled = true;

  bool operator==(const ConnectionGene&) const = default;
};

/// Feed-forward network genome with innovation-numbered connection genes.
///
/// Node id convention used by the trainer: inputs 0..n-1, bias n, outputs
/// n+1..n+m, hidden nodes above that. Evaluation does not rely on it.
struct NetGenome {
  int input_count = 0;
  int output_count = 1;
  std::vector<NodeGene> nodes;
  std::vector<ConnectionGene> connections;

  bool operator==(const NetGenome&) const = default;
};

/// Throws ValidationError on duplicate ids, dangling endpoints, connections
/// into input/bias nodes, a wrong number of input/output nodes, or a cycle
/// among enabled connections.
void validate(const NetGenome& genome);

double activate(Activation act, double x);
double sigmoid(double x);

/// A validated genome flattened into a topological evaluation plan.
class CompiledNet {
 public:
  explicit CompiledNet(const NetGenome& genome);

  int input_count() const { return input_count_; }

  /// Value of the first output node, in [0,1].
  double operator()(std::span<const double> inputs) const;

  /// Same, reusing `scratch` for node values.
  double operator()(std::span<const double> inputs, std::vector<double>& scratch) const;

 private:
  struct Step {
    std::size_t node;           // slot written
    Activation activation;
    std::size_t first, last;    // range in incoming_
  };
  struct Incoming {
    std::size_t source;
    double weight;
  };

  int input_count_ = 0;
  std::size_t slot_count_ = 0;
  std::vector<std::size_t> input_slots_;
  std::size_t bias_slot_ = 0;
  bool has_bias_ = false;
  std::size_t output_slot_ = 0;
  std::vector<Step> steps_;
  std::vector<Incoming> incoming_;
};

/// Evaluates the genome on one input vector; output node squashed by sigmoid.
double ann_forward(const NetGenome& genome, std::span<const double> inputs);

struct TriangularMf {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  bool operator==(const TriangularMf&) const = default;
};

/// Triangular membership with shoulder conventions: 1 at x == b; when a == b
/// the left side is a plateau (1 for x < b), when b == c the right side is.
double membership(const TriangularMf& mf, double x);

struct FuzzyRule {
  std::vector<std::uint8_t> antecedent;  // MF index per input, each in {0,1,2}
  double consequent = 0.5;

  bool operator==(const FuzzyRule&) const = default;
};

inline constexpr std::size_t kMfsPerInput = 3;

/// Zero-order Sugeno system: three triangular MFs per input, singleton consequents.
struct FuzzySystem {
  int input_count = 0;
  std::vector<std::array<TriangularMf, kMfsPerInput>> mfs;  // one triple per input
  std::vector<FuzzyRule> rules;

  bool operator==(const FuzzySystem&) const = default;
};

/// Throws ValidationError unless MFs are ordered on [0,1] and cover it, the
/// rule list is nonempty and antecedents are well formed.
void validate(const FuzzySystem& fs);

/// True when every x in [0,1] has positive membership in some MF of the triple.
bool covers_unit_interval(const std::array<TriangularMf, kMfsPerInput>& mfs);

/// Weighted average of consequents by min-of-memberships rule strength;
/// 0.5 when no rule fires.
double fuzzy_infer(const FuzzySystem& fs, std::span<const double> inputs);

struct FixedPointAlpha {
  double angle = 90.0;
  bool operator==(const FixedPointAlpha&) const = default;
};
struct RandomAlpha {
  bool operator==(const RandomAlpha&) const = default;
};

using AlphaPolicy = std::variant<FixedPointAlpha, RandomAlpha, NetGenome, FuzzySystem>;

/// Servo angle in degrees for the next acquisition.
double alpha_decide(const AlphaPolicy& policy, std::span<const double> context, Rng& rng);

}  // namespace cod2m
