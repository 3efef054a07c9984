#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cod2m/dataset.hpp"
#include "cod2m/models.hpp"
#include "cod2m/rng.hpp"

namespace testsupport {

using namespace cod2m;

/// Values that stress formatting: exact endpoints, tiny and long fractions.
inline double random_unit(Rng& rng) {
  switch (rng.below(6)) {
    case 0: return 0.0;
    case 1: return 1.0;
    case 2: return std::ldexp(1.0, -static_cast<int>(rng.below(60)) - 1);
    case 3: return std::round(rng.uniform() * 100.0) / 100.0;
    default: return rng.uniform();
  }
}

/// Random valid dataset with both classes on both days.
inline Dataset random_dataset(Rng& rng, std::size_t per_day = 0) {
  DatasetHeader header;
  for (auto& d : header.dims) d = 1 + rng.below(6);
  if (rng.chance(0.5)) header.note = "note " + std::to_string(rng.below(1000));
  const std::size_t n = per_day > 0 ? per_day : 2 + rng.below(20);
  std::vector<Sample> samples;
  std::int64_t next_id = static_cast<std::int64_t>(rng.below(1000));
  for (int day = 1; day <= 2; ++day) {
    for (std::size_t i = 0; i < n; ++i) {
      Sample s;
      s.id = next_id;
      next_id += 1 + static_cast<std::int64_t>(rng.below(3));
      s.condition = {day, random_unit(rng), random_unit(rng), rng.chance(0.5) ? TimeOfDay::Morning : TimeOfDay::Afternoon};
      s.position = {std::round(rng.uniform(0.0, header.terrain_width)), std::round(rng.uniform(0.0, header.terrain_height))};
      s.label = i < 2 ? (i == 0) : rng.chance(0.3);
      for (const auto k : kAllSensors) {
        auto& f = s.features[index_of(k)];
        f.resize(header.dims[index_of(k)]);
        for (auto& v : f) v = random_unit(rng);
      }
      samples.push_back(std::move(s));
    }
  }
  return Dataset(header, std::move(samples));
}

/// Random acyclic genome whose ids do not follow the trainer's convention.
inline NetGenome random_genome(Rng& rng, int inputs, int hidden, double edge_probability) {
  NetGenome g;
  g.input_count = inputs;
  g.output_count = 1;
  const int total = inputs + 1 + hidden + 1;
  std::vector<int> ids(static_cast<std::size_t>(total));
  for (int i = 0; i < total; ++i) ids[static_cast<std::size_t>(i)] = 100 + 7 * i;
  for (std::size_t i = ids.size() - 1; i > 0; --i) std::swap(ids[i], ids[rng.below(i + 1)]);
  const auto acts = std::array{Activation::Sigmoid, Activation::Tanh, Activation::Relu};
  for (int i = 0; i < total; ++i) {
    NodeRole role = i < inputs ? NodeRole::Input : i == inputs ? NodeRole::Bias : i == total - 1 ? NodeRole::Output : NodeRole::Hidden;
    const Activation act = role == NodeRole::Hidden ? acts[rng.below(3)] : Activation::Sigmoid;
    g.nodes.push_back({ids[static_cast<std::size_t>(i)], role, act});
  }
  int innovation = 0;
  for (int to = inputs + 1; to < total; ++to) {
    for (int from = 0; from < to; ++from) {
      if (!rng.chance(edge_probability) && !(to == total - 1 && from == 0)) continue;
      g.connections.push_back({innovation++, ids[static_cast<std::size_t>(from)], ids[static_cast<std::size_t>(to)],
                               rng.uniform(-3.0, 3.0), rng.chance(0.85)});
    }
  }
  for (std::size_t i = g.connections.size() - 1; i > 0; --i) std::swap(g.connections[i], g.connections[rng.below(i + 1)]);
  return g;
}

/// Recursive evaluation straight from the definition, independent of CompiledNet.
inline double reference_forward(const NetGenome& g, const std::vector<double>& inputs) {
  std::function<double(int)> value = [&](int id) -> double {
    const auto node = std::find_if(g.nodes.begin(), g.nodes.end(), [&](const NodeGene& n) { return n.id == id; });
    if (node->role == NodeRole::Bias) return 1.0;
    if (node->role == NodeRole::Input) {
      std::size_t index = 0;
      for (const auto& n : g.nodes) index += n.role == NodeRole::Input && n.id < id ? 1 : 0;
      return inputs[index];
    }
    std::vector<ConnectionGene> in;
    for (const auto& c : g.connections) {
      if (c.enabled && c.to == id) in.push_back(c);
    }
    std::sort(in.begin(), in.end(), [](const auto& a, const auto& b) { return a.innovation < b.innovation; });
    double sum = 0.0;
    for (const auto& c : in) sum += c.weight * value(c.from);
    if (node->role == NodeRole::Output) return 1.0 / (1.0 + std::exp(-sum));
    switch (node->activation) {
      case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-sum));
      case Activation::Tanh: return std::tanh(sum);
      case Activation::Relu: return sum > 0.0 ? sum : 0.0;
    }
    return 0.0;
  };
  for (const auto& n : g.nodes) {
    if (n.role == NodeRole::Output) return value(n.id);
  }
  return 0.0;
}

}  // namespace testsupport
