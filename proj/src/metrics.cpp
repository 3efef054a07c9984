#include "cod2m/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "cod2m/error.hpp"
#include "cod2m/text.hpp"

namespace cod2m::metrics {

namespace {

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) throw ValidationError("length mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  if (a == 0) throw ValidationError("empty input");
}

}  // namespace

ConfusionMatrix confusion(std::span<const double> scores, std::span<const bool> truths, double threshold) {
  check_lengths(scores.size(), truths.size());
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool positive = scores[i] >= threshold;
    if (truths[i]) {
      ++(positive ? cm.tp : cm.fn);
    } else {
      ++(positive ? cm.fp : cm.tn);
    }
  }
  return cm;
}

Rates rates(const ConfusionMatrix& cm) {
  const auto p = cm.positives();
  const auto n = cm.negatives();
  if (p <= 0 || n <= 0) {
    throw ValidationError(std::string("rates undefined: no ") + (p <= 0 ? "positive" : "negative") + " cases");
  }
  return {static_cast<double>(cm.tp) / static_cast<double>(p), static_cast<double>(cm.fp) / static_cast<double>(n),
          static_cast<double>(cm.tp + cm.tn) / static_cast<double>(p + n)};
}

double accuracy(std::span<const double> scores, std::span<const bool> truths, double threshold) {
  const auto cm = confusion(scores, truths, threshold);
  return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(scores.size());
}

double rmse(std::span<const double> expected, std::span<const double> predicted) {
  check_lengths(expected.size(), predicted.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const double d = expected[i] - predicted[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(expected.size()));
}

RocCurve roc(std::span<const double> scores, std::span<const bool> truths) {
  check_lengths(scores.size(), truths.size());
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return scores[l] > scores[r]; });

  const auto p = std::count(truths.begin(), truths.end(), true);
  const auto n = static_cast<std::int64_t>(truths.size()) - p;
  if (p == 0 || n == 0) throw ValidationError("ROC needs both classes");

  RocCurve curve;
  // Sentinel threshold above the maximum: nothing is positive.
  curve.points.push_back({0.0, 0.0});
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double threshold = scores[order[k]];
    while (k < order.size() && scores[order[k]] == threshold) {
      ++(truths[order[k]] ? tp : fp);
      ++k;
    }
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(n), static_cast<double>(tp) / static_cast<double>(p)});
  }
  if (curve.points.back() != RocPoint{1.0, 1.0}) curve.points.push_back({1.0, 1.0});
  std::sort(curve.points.begin(), curve.points.end());
  return curve;
}

double auc(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) / 2.0;
  }
  return std::clamp(area, 0.0, 1.0);
}

void validate(const RocCurve& curve) {
  const auto& pts = curve.points;
  if (pts.size() < 2 || pts.front() != RocPoint{0.0, 0.0} || pts.back() != RocPoint{1.0, 1.0}) {
    throw ValidationError("ROC curve must run from (0,0) to (1,1)");
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& q = pts[i];
    if (!(q.fpr >= 0.0 && q.fpr <= 1.0 && q.tpr >= 0.0 && q.tpr <= 1.0)) {
      throw ValidationError("ROC point outside the unit square");
    }
    if (i > 0 && (q.fpr < pts[i - 1].fpr || q.tpr < pts[i - 1].tpr)) {
      throw ValidationError("ROC points must be non-decreasing in fpr and tpr");
    }
  }
}

void write_roc_csv(const RocCurve& curve, std::ostream& out) {
  out << "fpr,tpr\n";
  for (const auto& q : curve.points) out << text::format_real(q.fpr) << ',' << text::format_real(q.tpr) << '\n';
}

RocCurve read_roc_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || text::trim(line) != "fpr,tpr") throw ParseError("ROC CSV must start with 'fpr,tpr'");
  RocCurve curve;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    const auto cols = text::split(line, ',');
    if (cols.size() != 2) throw ParseError("ROC CSV rows have two columns");
    curve.points.push_back({text::parse_real(cols[0], "fpr"), text::parse_real(cols[1], "tpr")});
  }
  validate(curve);
  return curve;
}

}  // namespace cod2m::metrics
