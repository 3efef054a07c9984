#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace cod2m::metrics {

/// "Positive" means an IED was detected.
struct ConfusionMatrix {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;
  std::int64_t fn = 0;

  std::int64_t positives() const { return tp + fn; }
  std::int64_t negatives() const { return fp + tn; }

  bool operator==(const ConfusionMatrix&) const = default;
};

struct Rates {
  double tpr = 0.0;
  double fpr = 0.0;
  double acc = 0.0;
};

/// Scores at or above `threshold` count as positive.
ConfusionMatrix confusion(std::span<const double> scores, std::span<const bool> truths, double threshold = 0.5);

/// Throws ValidationError when either class is empty.
Rates rates(const ConfusionMatrix& cm);

/// Fraction of correct decisions at `threshold`; defined for single-class inputs too.
double accuracy(std::span<const double> scores, std::span<const bool> truths, double threshold = 0.5);

double rmse(std::span<const double> expected, std::span<const double> predicted);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;

  bool operator==(const RocPoint&) const = default;
  auto operator<=>(const RocPoint&) const = default;
};

/// Sorted by (fpr, tpr), from (0,0) to (1,1).
struct RocCurve {
  std::vector<RocPoint> points;

  bool operator==(const RocCurve&) const = default;
};

/// Exact ROC: one point per distinct score used as a >= threshold, plus a
/// sentinel above the maximum. Throws ValidationError for single-class input.
RocCurve roc(std::span<const double> scores, std::span<const bool> truths);

/// Trapezoidal area under the curve.
double auc(const RocCurve& curve);

/// Throws ValidationError unless the curve is ordered, monotone, in the unit
/// square, and runs from (0,0) to (1,1).
void validate(const RocCurve& curve);

void write_roc_csv(const RocCurve& curve, std::ostream& out);
RocCurve read_roc_csv(std::istream& in);

}  // namespace cod2m::metrics
