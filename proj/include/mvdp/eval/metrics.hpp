#pragma once

#include <cstddef>
#include <span>

namespace mvdp::eval {

inline constexpr double kDefaultThreshold = 0.5;

struct MetricReport {
  double auc = 0.0;
  double recall = 0.0;
  double brier = 0.0;
  double pf = 0.0;
  double f1 = 0.0;
  double precision = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
  // Set when a ratio had a zero denominator and was reported as 0.
  bool degenerate = false;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  friend bool operator==(const MetricReport&, const MetricReport&) = default;
};

// Probability that a random positive outscores a random negative, ties
// counting one half. Throws EvaluationError unless both classes are present.
double auc(std::span<const double> scores, std::span<const int> labels);

// Mean squared difference between defective-class probability and outcome.
// Throws EvaluationError on empty input.
double brier(std::span<const double> probs, std::span<const int> labels);

// Predicts defective iff prob >= threshold and fills the confusion counts,
// recall, pf, precision and f1. Zero denominators give 0 and set `degenerate`.
// auc and brier are left at 0.
MetricReport confusion_and_threshold_metrics(std::span<const double> probs, std::span<const int> labels,
                                             double threshold = kDefaultThreshold);

// All five measures. auc is NaN-free: single-class inputs raise EvaluationError.
MetricReport evaluate(std::span<const double> probs, std::span<const int> labels,
                      double threshold = kDefaultThreshold);

}  // namespace mvdp::eval
