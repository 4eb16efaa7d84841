#include "mvdp/eval/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "mvdp/error.hpp"

namespace mvdp::eval {

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ValidationError("Wilcoxon test needs paired samples; got " + std::to_string(a.size()) + " and " +
                          std::to_string(b.size()));
  }
  std::vector<double> diffs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d != 0.0) diffs.push_back(d);
  }
  WilcoxonResult result;
  result.n = diffs.size();
  if (diffs.empty()) {
    result.degenerate = true;
    return result;
  }
  const std::size_t n = diffs.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return std::abs(diffs[x]) < std::abs(diffs[y]); });
  // Doubled mid-ranks keep everything in integers.
  std::vector<std::int64_t> rank2(n);
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && std::abs(diffs[order[j + 1]]) == std::abs(diffs[order[i]])) ++j;
    const auto mid2 = static_cast<std::int64_t>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) rank2[order[k]] = mid2;
    const auto t = static_cast<double>(j - i + 1);
    tie_term += t * t * t - t;
    i = j + 1;
  }
  std::int64_t total2 = 0;
  std::int64_t observed2 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total2 += rank2[i];
    if (diffs[i] > 0.0) observed2 += rank2[i];
  }
  result.statistic = static_cast<double>(observed2) / 2.0;

  if (n <= kExactWilcoxonLimit) {
    // |2 T - total| measures the distance of T from its null mean total / 2.
    const std::int64_t observed_dev = std::abs(2 * observed2 - total2);
    const std::uint32_t patterns = 1u << n;
    std::uint32_t extreme = 0;
    for (std::uint32_t mask = 0; mask < patterns; ++mask) {
      std::int64_t t2 = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (mask & (1u << i)) t2 += rank2[i];
      }
      if (std::abs(2 * t2 - total2) >= observed_dev) ++extreme;
    }
    result.exact = true;
    result.p_value = static_cast<double>(extreme) / static_cast<double>(patterns);
    return result;
  }

  result.exact = false;
  const auto nn = static_cast<double>(n);
  const double mean = nn * (nn + 1.0) / 4.0;
  const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
  if (var <= 0.0) {
    result.p_value = 1.0;
    return result;
  }
  const double z = (result.statistic - mean) / std::sqrt(var);
  result.p_value = std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
  return result;
}

double cliffs_delta(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ValidationError("Cliff's delta needs two non-empty samples");
  long long greater = 0;
  long long less = 0;
  for (double x : a) {
    for (double y : b) {
      if (x > y) {
        ++greater;
      } else if (x < y) {
        ++less;
      }
    }
  }
  return static_cast<double>(greater - less) / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

std::vector<double> bonferroni(std::span<const double> p_values, std::size_t m) {
  if (m < p_values.size()) {
    throw ValidationError("Bonferroni factor " + std::to_string(m) + " is smaller than the " +
                          std::to_string(p_values.size()) + " p-values given");
  }
  std::vector<double> out;
  out.reserve(p_values.size());
  for (double p : p_values) out.push_back(std::min(1.0, p * static_cast<double>(m)));
  return out;
}

}  // namespace mvdp::eval
