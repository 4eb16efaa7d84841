#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mvdp::eval {

inline constexpr std::size_t kExactWilcoxonLimit = 12;
inline constexpr double kSignificanceLevel = 0.05;
inline constexpr double kLargeEffect = 0.33;

struct WilcoxonResult {
  double p_value = 1.0;
  double statistic = 0.0;   // W+ (sum of ranks of positive differences)
  std::size_t n = 0;        // pairs with a non-zero difference
  bool exact = true;
  bool degenerate = false;  // every difference was zero
};

// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences are
// dropped and tied |differences| get mid-ranks. For n <= 12 the p-value is the
// exact share of the 2^n sign assignments whose statistic is at least as far
// from its null mean as the observed one; above that a normal approximation
// with tie correction (no continuity correction) is used.
// Throws ValidationError on unequal lengths.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

// (#{a_i > b_j} - #{a_i < b_j}) / (|a| |b|). Throws ValidationError on empty input.
double cliffs_delta(std::span<const double> a, std::span<const double> b);

// Each p multiplied by m and capped at 1. Throws ValidationError when m is
// smaller than the number of p-values.
std::vector<double> bonferroni(std::span<const double> p_values, std::size_t m);

struct StatTestResult {
  std::string measure;
  double p_value = 1.0;
  double p_value_bonferroni = 1.0;
  double cliffs_delta = 0.0;
  bool significant = false;   // adjusted p < 0.05
  bool large_effect = false;  // |delta| >= 0.33
  bool degenerate = false;
};

}  // namespace mvdp::eval
