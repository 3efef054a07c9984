#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "cod2m/dataset.hpp"
#include "cod2m/models.hpp"

namespace cod2m::fusion {

/// The five local decisions in SensorKind order.
class BetaSet {
 public:
  /// Throws ValidationError if any value is outside [0,1].
  explicit BetaSet(const std::array<double, kSensorCount>& values);

  const std::array<double, kSensorCount>& values() const { return values_; }
  double operator[](SensorKind kind) const { return values_[index_of(kind)]; }

 private:
  std::array<double, kSensorCount> values_;
};

enum class AggKind : std::uint8_t { Max = 1, Avg = 2, Mdn = 3 };

double aggregate(const BetaSet& b, AggKind kind);

/// 1 when at least three agents have beta >= 0.5, otherwise 0.
double vote(const BetaSet& b);

struct VoteMethod {};

using OmegaMethod = std::variant<NetGenome, FuzzySystem, VoteMethod, AggKind>;

/// Cooperative decision for one agent; model-backed methods receive the five betas in order.
double omega(const BetaSet& b, const OmegaMethod& method);

bool binarize(double value, double threshold = 0.5);

struct SystemDecision {
  SensorKind winner = SensorKind::VS;
  double value = 0.0;
  bool verdict = false;
};

/// Greatest omega wins; ties go to the earlier sensor in VS, IR, UV, TM, GP order.
SystemDecision system_decision(const std::array<double, kSensorCount>& omegas);

}  // namespace cod2m::fusion
