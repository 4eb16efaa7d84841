#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mvdp/graph.hpp"
#include "mvdp/ingest.hpp"
#include "mvdp/rng.hpp"

namespace mvdp::support {

// Five modules A..E with the dependencies and shared developers of the
// reference example: CDG C->A 3, E->A 7, E->B 8, C->E 11, D->E 9;
// DDG A<->C 5, B<->D 3.
inline ingest::VersionDataset five_module_dataset() {
  using ingest::DependencyKind;
  ingest::VersionDataset ds;
  ds.project = "five";
  ds.version = "1";
  ds.manifest.names = {"m0", "m1"};
  ds.manifest.categories = {ingest::MetricCategory::code, ingest::MetricCategory::process};
  const std::vector<std::string> ids{"A", "B", "C", "D", "E"};
  const std::vector<int> labels{1, 0, 1, 0, 0};
  for (std::size_t i = 0; i < ids.size(); ++i) {
    ds.records.push_back({ids[i], {static_cast<double>(i), static_cast<double>(10 - i)}, labels[i]});
  }
  ds.dep_edges = {
      {"C", "A", DependencyKind::data, 1}, {"C", "A", DependencyKind::call, 2},
      {"E", "A", DependencyKind::call, 7},  {"E", "B", DependencyKind::data, 5},
      {"E", "B", DependencyKind::call, 3},  {"C", "E", DependencyKind::call, 11},
      {"D", "E", DependencyKind::data, 9},
  };
  for (int k = 0; k < 5; ++k) {
    ds.ownership.push_back({"A", "ac" + std::to_string(k)});
    ds.ownership.push_back({"C", "ac" + std::to_string(k)});
  }
  for (int k = 0; k < 3; ++k) {
    ds.ownership.push_back({"B", "bd" + std::to_string(k)});
    ds.ownership.push_back({"D", "bd" + std::to_string(k)});
  }
  ds.ownership.push_back({"E", "solo"});
  return ds;
}

// Random directed graph over n nodes with positive weights.
inline graph::DependencyGraph random_graph(std::size_t n, double density, Rng& rng,
                                           graph::View view = graph::View::CDG) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("n" + std::to_string(i));
  graph::DependencyGraph::EdgeMap edges;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b && rng.bernoulli(density)) edges[{a, b}] = 0.5 + static_cast<double>(rng.index(9));
    }
  }
  return graph::DependencyGraph(view, std::move(ids), std::move(edges), false, false);
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("mvdp_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

namespace oracle {

// Pairwise definition; ties count one half.
inline double auc(const std::vector<double>& s, const std::vector<int>& y) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      pairs += 1.0;
      if (s[i] > s[j]) wins += 1.0;
      if (s[i] == s[j]) wins += 0.5;
    }
  }
  return wins / pairs;
}

inline double brier(const std::vector<double>& p, const std::vector<int>& y) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += (p[i] - y[i]) * (p[i] - y[i]);
  return sum / static_cast<double>(p.size());
}

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double recall = 0.0, pf = 0.0, precision = 0.0, f1 = 0.0;
};

inline Confusion confusion(const std::vector<double>& p, const std::vector<int>& y, double threshold = 0.5) {
  Confusion c;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const bool pred = p[i] >= threshold;
    if (pred && y[i] == 1) ++c.tp;
    if (pred && y[i] == 0) ++c.fp;
    if (!pred && y[i] == 0) ++c.tn;
    if (!pred && y[i] == 1) ++c.fn;
  }
  auto ratio = [](std::size_t a, std::size_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / b; };
  c.recall = ratio(c.tp, c.tp + c.fn);
  c.pf = ratio(c.fp, c.fp + c.tn);
  c.precision = ratio(c.tp, c.tp + c.fp);
  c.f1 = c.precision + c.recall == 0.0 ? 0.0 : 2.0 * c.precision * c.recall / (c.precision + c.recall);
  return c;
}

// Counting via sorted b and binary search.
inline double cliffs_delta(const std::vector<double>& a, std::vector<double> b) {
  std::sort(b.begin(), b.end());
  long long score = 0;
  for (double x : a) {
    const auto below = std::lower_bound(b.begin(), b.end(), x) - b.begin();
    const auto above = b.end() - std::upper_bound(b.begin(), b.end(), x);
    score += below - above;
  }
  return static_cast<double>(score) / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

// Reads the edge map directly instead of the adjacency lists.
inline double share_total(const graph::DependencyGraph& g, const std::vector<int>& labels) {
  const std::size_t n = g.node_count();
  std::vector<double> w1(n, 0.0), w2(n, 0.0);
  for (const auto& [key, w] : g.edges()) {
    w1[key.first] += w;
    if (labels[key.first] == labels[key.second]) w2[key.first] += w;
  }
  double total = 0.0;
  for (std::size_t v = 0; v < n; ++v) total += w1[v] > 0.0 ? w2[v] / w1[v] : 0.0;
  return n ? total / static_cast<double>(n) : 0.0;
}

// Exhaustive sign-pattern enumeration with mid-ranks found by counting.
inline double wilcoxon_exact_p(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) d.push_back(a[i] - b[i]);
  }
  const std::size_t n = d.size();
  if (n == 0) return 1.0;
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t less = 0, equal = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(d[j]) < std::abs(d[i])) ++less;
      if (std::abs(d[j]) == std::abs(d[i])) ++equal;
    }
    rank[i] = static_cast<double>(less) + (static_cast<double>(equal) + 1.0) / 2.0;
  }
  double total = 0.0, observed = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += rank[i];
    if (d[i] > 0) observed += rank[i];
  }
  const double mean = total / 2.0;
  const double dev = std::abs(observed - mean);
  std::uint64_t extreme = 0;
  const std::uint64_t patterns = std::uint64_t{1} << n;
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if ((mask >> i) & 1u) t += rank[i];
    }
    if (std::abs(t - mean) >= dev) ++extreme;
  }
  return static_cast<double>(extreme) / static_cast<double>(patterns);
}

}  // namespace oracle
}  // namespace mvdp::support
