#include "cod2m/serialize.hpp"

#include <fstream>

#include "cod2m/error.hpp"

namespace cod2m {

using nlohmann::json;

namespace {

constexpr const char* kNetFormat = "net-genome v1";
constexpr const char* kFuzzyFormat = "fuzzy-system v1";

std::string role_name(NodeRole r) {
  switch (r) {
    case NodeRole::Input: return "input";
    case NodeRole::Hidden: return "hidden";
    case NodeRole::Output: return "output";
    case NodeRole::Bias: return "bias";
  }
  return "?";
}

NodeRole parse_role(const std::string& s) {
  if (s == "input") return NodeRole::Input;
  if (s == "hidden") return NodeRole::Hidden;
  if (s == "output") return NodeRole::Output;
  if (s == "bias") return NodeRole::Bias;
  throw ParseError("unknown node role '" + s + "'");
}

void expect_format(const json& doc, const char* format) {
  if (!doc.is_object() || !doc.contains("format") || doc["format"] != format) {
    throw ParseError(std::string("expected a '") + format + "' document");
  }
}

}  // namespace

std::string activation_name(Activation a) {
  switch (a) {
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Tanh: return "tanh";
    case Activation::Relu: return "relu";
  }
  return "?";
}

Activation parse_activation(const std::string& s) {
  if (s == "sigmoid") return Activation::Sigmoid;
  if (s == "tanh") return Activation::Tanh;
  if (s == "relu") return Activation::Relu;
  throw ParseError("unknown activation '" + s + "'");
}

json to_json(const NetGenome& g) {
  json nodes = json::array();
  for (const auto& n : g.nodes) {
    nodes.push_back({{"id", n.id}, {"role", role_name(n.role)}, {"activation", activation_name(n.activation)}});
  }
  json conns = json::array();
  for (const auto& c : g.connections) {
    conns.push_back(
        {{"innovation", c.innovation}, {"from", c.from}, {"to", c.to}, {"weight", c.weight}, {"enabled", c.enabled}});
  }
  return {{"format", kNetFormat},
          {"input_count", g.input_count},
          {"output_count", g.output_count},
          {"nodes", std::move(nodes)},
          {"connections", std::move(conns)}};
}

NetGenome net_genome_from_json(const json& doc) {
  expect_format(doc, kNetFormat);
  NetGenome g;
  try {
    g.input_count = doc.at("input_count").get<int>();
    g.output_count = doc.at("output_count").get<int>();
    for (const auto& n : doc.at("nodes")) {
      g.nodes.push_back({n.at("id").get<int>(), parse_role(n.at("role").get<std::string>()),
                         parse_activation(n.at("activation").get<std::string>())});
    }
    for (const auto& c : doc.at("connections")) {
      g.connections.push_back({c.at("innovation").get<int>(), c.at("from").get<int>(), c.at("to").get<int>(),
                               c.at("weight").get<double>(), c.at("enabled").get<bool>()});
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("net-genome document: ") + e.what());
  }
  validate(g);
  return g;
}

json to_json(const FuzzySystem& fs) {
  json mfs = json::array();
  for (const auto& triple : fs.mfs) {
    json t = json::array();
    for (const auto& mf : triple) t.push_back({mf.a, mf.b, mf.c});
    mfs.push_back(std::move(t));
  }
  json rules = json::array();
  for (const auto& r : fs.rules) rules.push_back({{"antecedent", r.antecedent}, {"consequent", r.consequent}});
  return {{"format", kFuzzyFormat}, {"input_count", fs.input_count}, {"mfs", std::move(mfs)}, {"rules", std::move(rules)}};
}

FuzzySystem fuzzy_system_from_json(const json& doc) {
  expect_format(doc, kFuzzyFormat);
  FuzzySystem fs;
  try {
    fs.input_count = doc.at("input_count").get<int>();
    for (const auto& t : doc.at("mfs")) {
      if (t.size() != kMfsPerInput) throw ParseError("each input needs exactly three MFs");
      std::array<TriangularMf, kMfsPerInput> triple;
      for (std::size_t k = 0; k < kMfsPerInput; ++k) {
        const auto& v = t.at(k);
        if (v.size() != 3) throw ParseError("an MF is written as [a, b, c]");
        triple[k] = {v.at(0).get<double>(), v.at(1).get<double>(), v.at(2).get<double>()};
      }
      fs.mfs.push_back(triple);
    }
    for (const auto& r : doc.at("rules")) {
      fs.rules.push_back({r.at("antecedent").get<std::vector<std::uint8_t>>(), r.at("consequent").get<double>()});
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("fuzzy-system document: ") + e.what());
  }
  validate(fs);
  return fs;
}

json to_json(const AlphaPolicy& policy) {
  struct Visitor {
    json operator()(const FixedPointAlpha& p) const { return {{"policy", "P"}, {"angle", p.angle}}; }
    json operator()(const RandomAlpha&) const { return {{"policy", "R"}}; }
    json operator()(const NetGenome& g) const { return {{"policy", "N"}, {"model", to_json(g)}}; }
    json operator()(const FuzzySystem& fs) const { return {{"policy", "F"}, {"model", to_json(fs)}}; }
  };
  return std::visit(Visitor{}, policy);
}

AlphaPolicy alpha_policy_from_json(const json& doc) {
  try {
    const auto kind = doc.at("policy").get<std::string>();
    if (kind == "P") return FixedPointAlpha{doc.at("angle").get<double>()};
    if (kind == "R") return RandomAlpha{};
    if (kind == "N") return net_genome_from_json(doc.at("model"));
    if (kind == "F") return fuzzy_system_from_json(doc.at("model"));
    throw ParseError("unknown alpha policy '" + kind + "'");
  } catch (const json::exception& e) {
    throw ParseError(std::string("alpha policy document: ") + e.what());
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_json_file(const json& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace cod2m
