#include "mvdp/eval/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "mvdp/error.hpp"

namespace mvdp::eval {

namespace {
void require_aligned(std::span<const double> values, std::span<const int> labels) {
  if (values.size() != labels.size()) {
    throw EvaluationError("got " + std::to_string(values.size()) + " scores for " + std::to_string(labels.size()) +
                          " labels");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) throw EvaluationError("labels must be 0 or 1");
  }
}
}  // namespace

double auc(std::span<const double> scores, std::span<const int> labels) {
  require_aligned(scores, labels);
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Mann-Whitney U from mid-ranks; ranks are doubled to stay integral.
  long long rank_sum2 = 0;
  std::size_t positives = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const long long mid2 = static_cast<long long>(i + 1) + static_cast<long long>(j + 1);
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1) {
        rank_sum2 += mid2;
        ++positives;
      }
    }
    i = j + 1;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) throw EvaluationError("AUC needs both classes present");
  const auto p = static_cast<long long>(positives);
  // 2U = 2 * sum(ranks of positives) - p(p+1)
  const long long u2 = rank_sum2 - p * (p + 1);
  return static_cast<double>(u2) / (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

double brier(std::span<const double> probs, std::span<const int> labels) {
  require_aligned(probs, labels);
  if (probs.empty()) throw EvaluationError("Brier score of an empty sample");
  double total = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const double d = probs[i] - static_cast<double>(labels[i]);
    total += d * d;
  }
  return total / static_cast<double>(probs.size());
}

MetricReport confusion_and_threshold_metrics(std::span<const double> probs, std::span<const int> labels,
                                             double threshold) {
  require_aligned(probs, labels);
  MetricReport r;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    const bool predicted = probs[i] >= threshold;
    if (labels[i] == 1) {
      predicted ? ++r.tp : ++r.fn;
    } else {
      predicted ? ++r.fp : ++r.tn;
    }
  }
  auto ratio = [&r](std::size_t num, std::size_t den) {
    if (den == 0) {
      r.degenerate = true;
      return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
  };
  r.recall = ratio(r.tp, r.tp + r.fn);
  r.pf = ratio(r.fp, r.fp + r.tn);
  r.precision = ratio(r.tp, r.tp + r.fp);
  if (r.precision == 0.0 || r.recall == 0.0) {
    r.f1 = 0.0;
    // f1 is undefined (rather than just zero) when no positives are predicted
    // or none exist.
    if (r.tp + r.fp == 0 || r.tp + r.fn == 0) r.degenerate = true;
  } else {
    r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  }
  return r;
}

MetricReport evaluate(std::span<const double> probs, std::span<const int> labels, double threshold) {
  MetricReport r = confusion_and_threshold_metrics(probs, labels, threshold);
  r.auc = auc(probs, labels);
  r.brier = brier(probs, labels);
  return r;
}

}  // namespace mvdp::eval
