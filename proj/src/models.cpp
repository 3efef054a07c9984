#include "cod2m/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "cod2m/error.hpp"

namespace cod2m {

namespace {

std::unordered_map<int, std::size_t> index_nodes(const NetGenome& g) {
  std::unordered_map<int, std::size_t> slot;
  slot.reserve(g.nodes.size());
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (!slot.emplace(g.nodes[i].id, i).second) {
      throw ValidationError("duplicate node id " + std::to_string(g.nodes[i].id));
    }
  }
  return slot;
}

// Kahn's algorithm over enabled connections; returns node slots in evaluation order.
std::vector<std::size_t> topological_order(const NetGenome& g, const std::unordered_map<int, std::size_t>& slot) {
  const auto n = g.nodes.size();
  std::vector<std::size_t> indegree(n, 0);
  std::vector<std::vector<std::size_t>> out(n);
  for (const auto& c : g.connections) {
    if (!c.enabled) continue;
    const auto from = slot.at(c.from);
    const auto to = slot.at(c.to);
    out[from].push_back(to);
    ++indegree[to];
  }
  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<std::size_t> ready;
  for (std::size_t i = n; i-- > 0;) {
    if (indegree[i] == 0) ready.push_back(i);
  }
  while (!ready.empty()) {
    // Pop the lowest slot first so the order does not depend on connection order.
    const auto it = std::min_element(ready.begin(), ready.end());
    const auto v = *it;
    ready.erase(it);
    order.push_back(v);
    for (const auto w : out[v]) {
      if (--indegree[w] == 0) ready.push_back(w);
    }
  }
  if (order.size() != n) throw ValidationError("genome has a cycle among enabled connections");
  return order;
}

}  // namespace

void validate(const NetGenome& g) {
  if (g.input_count < 0 || g.output_count < 1) throw ValidationError("genome needs >= 0 inputs and >= 1 output");
  const auto slot = index_nodes(g);
  int inputs = 0;
  int outputs = 0;
  int biases = 0;
  for (const auto& node : g.nodes) {
    switch (node.role) {
      case NodeRole::Input: ++inputs; break;
      case NodeRole::Output: ++outputs; break;
      case NodeRole::Bias: ++biases; break;
      case NodeRole::Hidden: break;
    }
  }
  if (inputs != g.input_count) {
    throw ValidationError("genome declares " + std::to_string(g.input_count) + " inputs but has " +
                          std::to_string(inputs) + " input nodes");
  }
  if (outputs != g.output_count) {
    throw ValidationError("genome declares " + std::to_string(g.output_count) + " outputs but has " +
                          std::to_string(outputs) + " output nodes");
  }
  if (biases > 1) throw ValidationError("genome has more than one bias node");

  std::unordered_set<int> innovations;
  for (const auto& c : g.connections) {
    if (!innovations.insert(c.innovation).second) {
      throw ValidationError("duplicate innovation id " + std::to_string(c.innovation));
    }
    const auto from = slot.find(c.from);
    const auto to = slot.find(c.to);
    if (from == slot.end() || to == slot.end()) {
      throw ValidationError("connection " + std::to_string(c.innovation) + " references a missing node");
    }
    const auto role = g.nodes[to->second].role;
    if (role == NodeRole::Input || role == NodeRole::Bias) {
      throw ValidationError("connection " + std::to_string(c.innovation) + " feeds an input or bias node");
    }
    if (!std::isfinite(c.weight)) {
      throw ValidationError("connection " + std::to_string(c.innovation) + " has a non-finite weight");
    }
  }
  topological_order(g, slot);
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double activate(Activation act, double x) {
  switch (act) {
    case Activation::Sigmoid: return sigmoid(x);
    case Activation::Tanh: return std::tanh(x);
    case Activation::Relu: return x > 0.0 ? x : 0.0;
  }
  return x;
}

CompiledNet::CompiledNet(const NetGenome& g) : input_count_(g.input_count) {
  validate(g);
  const auto slot = index_nodes(g);
  slot_count_ = g.nodes.size();

  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const auto& node = g.nodes[i];
    if (node.role == NodeRole::Input) input_slots_.push_back(i);
    if (node.role == NodeRole::Bias) {
      has_bias_ = true;
      bias_slot_ = i;
    }
  }
  // Inputs bind in ascending id order.
  std::sort(input_slots_.begin(), input_slots_.end(),
            [&](std::size_t l, std::size_t r) { return g.nodes[l].id < g.nodes[r].id; });
  bool found_output = false;
  for (std::size_t i = 0; i < g.nodes.size() && !found_output; ++i) {
    if (g.nodes[i].role == NodeRole::Output) {
      output_slot_ = i;
      found_output = true;
    }
  }

  // Incoming lists sorted by innovation fix the summation order.
  std::vector<std::vector<const ConnectionGene*>> incoming(g.nodes.size());
  for (const auto& c : g.connections) {
    if (c.enabled) incoming[slot.at(c.to)].push_back(&c);
  }
  for (auto& list : incoming) {
    std::sort(list.begin(), list.end(),
              [](const ConnectionGene* l, const ConnectionGene* r) { return l->innovation < r->innovation; });
  }

  for (const auto v : topological_order(g, slot)) {
    const auto& node = g.nodes[v];
    if (node.role == NodeRole::Input || node.role == NodeRole::Bias) continue;
    Step step{v, node.role == NodeRole::Output ? Activation::Sigmoid : node.activation, incoming_.size(), 0};
    for (const auto* c : incoming[v]) incoming_.push_back({slot.at(c->from), c->weight});
    step.last = incoming_.size();
    steps_.push_back(step);
  }
}

double CompiledNet::operator()(std::span<const double> inputs) const {
  std::vector<double> scratch;
  return (*this)(inputs, scratch);
}

double CompiledNet::operator()(std::span<const double> inputs, std::vector<double>& value) const {
  if (inputs.size() != static_cast<std::size_t>(input_count_)) {
    throw ValidationError("network expects " + std::to_string(input_count_) + " inputs, got " +
                          std::to_string(inputs.size()));
  }
  value.assign(slot_count_, 0.0);
  for (std::size_t i = 0; i < input_slots_.size(); ++i) value[input_slots_[i]] = inputs[i];
  if (has_bias_) value[bias_slot_] = 1.0;
  for (const auto& step : steps_) {
    double sum = 0.0;
    for (auto k = step.first; k < step.last; ++k) sum += incoming_[k].weight * value[incoming_[k].source];
    value[step.node] = activate(step.activation, sum);
  }
  return value[output_slot_];
}

double ann_forward(const NetGenome& genome, std::span<const double> inputs) {
  return CompiledNet(genome)(inputs);
}

double membership(const TriangularMf& mf, double x) {
  if (x == mf.b) return 1.0;
  if (x < mf.b) {
    if (mf.a == mf.b) return 1.0;
    return std::max(0.0, (x - mf.a) / (mf.b - mf.a));
  }
  if (mf.b == mf.c) return 1.0;
  return std::max(0.0, (mf.c - x) / (mf.c - mf.b));
}

bool covers_unit_interval(const std::array<TriangularMf, kMfsPerInput>& mfs) {
  // Each MF is positive exactly on an open interval around b; shoulders extend it to infinity.
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::array<std::pair<double, double>, kMfsPerInput> spans;
  for (std::size_t i = 0; i < kMfsPerInput; ++i) {
    spans[i] = {mfs[i].a == mfs[i].b ? -inf : mfs[i].a, mfs[i].b == mfs[i].c ? inf : mfs[i].c};
  }
  // Greedy sweep: `need` is the leftmost point of [0,1] not yet known to be covered.
  double need = 0.0;
  while (need <= 1.0) {
    double reach = -inf;
    for (const auto& [lo, hi] : spans) {
      if (lo < need && hi > need) reach = std::max(reach, hi);
    }
    if (reach == -inf) return false;
    need = reach;
  }
  return true;
}

void validate(const FuzzySystem& fs) {
  if (fs.input_count < 1) throw ValidationError("fuzzy system needs at least one input");
  if (fs.mfs.size() != static_cast<std::size_t>(fs.input_count)) {
    throw ValidationError("fuzzy system needs one MF triple per input");
  }
  for (std::size_t i = 0; i < fs.mfs.size(); ++i) {
    for (const auto& mf : fs.mfs[i]) {
      if (!(0.0 <= mf.a && mf.a <= mf.b && mf.b <= mf.c && mf.c <= 1.0)) {
        throw ValidationError("input " + std::to_string(i) + " has an MF outside 0 <= a <= b <= c <= 1");
      }
    }
    if (!covers_unit_interval(fs.mfs[i])) {
      throw ValidationError("input " + std::to_string(i) + " MFs leave part of [0,1] uncovered");
    }
  }
  if (fs.rules.empty()) throw ValidationError("fuzzy system has no rules");
  for (std::size_t r = 0; r < fs.rules.size(); ++r) {
    const auto& rule = fs.rules[r];
    if (rule.antecedent.size() != static_cast<std::size_t>(fs.input_count)) {
      throw ValidationError("rule " + std::to_string(r) + " antecedent arity mismatch");
    }
    for (const auto idx : rule.antecedent) {
      if (idx >= kMfsPerInput) throw ValidationError("rule " + std::to_string(r) + " antecedent index out of range");
    }
    if (!(rule.consequent >= 0.0 && rule.consequent <= 1.0)) {
      throw ValidationError("rule " + std::to_string(r) + " consequent outside [0,1]");
    }
  }
}

double fuzzy_infer(const FuzzySystem& fs, std::span<const double> inputs) {
  if (inputs.size() != static_cast<std::size_t>(fs.input_count)) {
    throw ValidationError("fuzzy system expects " + std::to_string(fs.input_count) + " inputs, got " +
                          std::to_string(inputs.size()));
  }
  std::vector<std::array<double, kMfsPerInput>> mu(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const double x = inputs[i];
    if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("fuzzy input " + std::to_string(i) + " outside [0,1]");
    for (std::size_t k = 0; k < kMfsPerInput; ++k) mu[i][k] = membership(fs.mfs[i][k], x);
  }
  double num = 0.0;
  double den = 0.0;
  for (const auto& rule : fs.rules) {
    double strength = 1.0;
    for (std::size_t i = 0; i < inputs.size() && strength > 0.0; ++i) {
      strength = std::min(strength, mu[i][rule.antecedent[i]]);
    }
    num += strength * rule.consequent;
    den += strength;
  }
  if (den <= 0.0) return 0.5;
  return std::clamp(num / den, 0.0, 1.0);
}

double alpha_decide(const AlphaPolicy& policy, std::span<const double> context, Rng& rng) {
  struct Visitor {
    std::span<const double> context;
    Rng& rng;
    double operator()(const FixedPointAlpha& p) const {
      if (!(p.angle >= 0.0 && p.angle <= 180.0)) throw ValidationError("fixed alpha angle outside [0,180]");
      return p.angle;
    }
    double operator()(const RandomAlpha&) const { return rng.uniform() * 180.0; }
    double operator()(const NetGenome& g) const { return 180.0 * ann_forward(g, context); }
    double operator()(const FuzzySystem& fs) const { return 180.0 * fuzzy_infer(fs, context); }
  };
  return std::visit(Visitor{context, rng}, policy);
}

}  // namespace cod2m
