#include "cod2m/fusion.hpp"

#include <algorithm>
#include <numeric>

#include "cod2m/error.hpp"

namespace cod2m::fusion {

BetaSet::BetaSet(const std::array<double, kSensorCount>& values) : values_(values) {
  for (const double v : values_) {
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("beta values must be in [0,1]");
  }
}

double aggregate(const BetaSet& b, AggKind kind) {
  const auto& v = b.values();
  switch (kind) {
    case AggKind::Max: return *std::max_element(v.begin(), v.end());
    case AggKind::Avg: return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    case AggKind::Mdn: {
      auto sorted = v;
      std::nth_element(sorted.begin(), sorted.begin() + kSensorCount / 2, sorted.end());
      return sorted[kSensorCount / 2];
    }
  }
  throw ValidationError("unknown aggregation");
}

double vote(const BetaSet& b) {
  const auto& v = b.values();
  const auto votes = std::count_if(v.begin(), v.end(), [](double x) { return binarize(x); });
  return votes >= 3 ? 1.0 : 0.0;
}

double omega(const BetaSet& b, const OmegaMethod& method) {
  struct Visitor {
    const BetaSet& b;
    double operator()(const NetGenome& g) const { return ann_forward(g, b.values()); }
    double operator()(const FuzzySystem& fs) const { return fuzzy_infer(fs, b.values()); }
    double operator()(const VoteMethod&) const { return vote(b); }
    double operator()(AggKind kind) const { return aggregate(b, kind); }
  };
  return std::visit(Visitor{b}, method);
}

bool binarize(double value, double threshold) { return value >= threshold; }

SystemDecision system_decision(const std::array<double, kSensorCount>& omegas) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < kSensorCount; ++i) {
    if (omegas[i] > omegas[best]) best = i;
  }
  return {kAllSensors[best], omegas[best], binarize(omegas[best])};
}

}  // namespace cod2m::fusion
