#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "mvdp/error.hpp"
#include "mvdp/ingest.hpp"
#include "mvdp/rng.hpp"

namespace mvdp::ingest {

namespace {

std::string file_name(std::size_t i) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "src/mod%02zu/File%04zu.java", i % 17, i);
  return buf;
}

std::string developer_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "dev%03zu", i);
  return buf;
}

// Draws from `pool`, avoiding `exclude` when the pool has another member.
std::size_t draw_other(Rng& rng, const std::vector<std::size_t>& pool, std::size_t exclude) {
  if (pool.size() == 1) return pool[0];
  for (;;) {
    const std::size_t pick = pool[rng.index(pool.size())];
    if (pick != exclude) return pick;
  }
}

}  // namespace

VersionDataset generate_synthetic(const SyntheticConfig& config, std::uint64_t seed) {
  if (config.n_nodes < 4) throw ConfigError("synthetic dataset needs at least 4 nodes");
  if (!(config.defect_rate > 0.0 && config.defect_rate < 1.0)) {
    throw ConfigError("defect_rate must lie in (0, 1)");
  }
  if (!(config.homophily >= 0.0 && config.homophily <= 1.0)) {
    throw ConfigError("homophily must lie in [0, 1]");
  }
  if (config.mean_degree < 0.0) throw ConfigError("mean_degree must be non-negative");
  if (config.n_metrics < 1) throw ConfigError("n_metrics must be at least 1");
  const auto n = config.n_nodes;
  const auto n_defective = static_cast<std::size_t>(std::llround(config.defect_rate * static_cast<double>(n)));
  const double expected = config.defect_rate * static_cast<double>(n);
  if (expected < 1.0 || static_cast<double>(n) - expected < 1.0 || n_defective < 1 || n_defective >= n) {
    throw ConfigError("defect_rate * n_nodes must leave at least one file in each class");
  }
  if (config.n_developers < 2) throw ConfigError("n_developers must be at least 2");
  if (!(config.view_coverage > 0.0 && config.view_coverage <= 1.0)) {
    throw ConfigError("view_coverage must lie in (0, 1]");
  }

  Rng rng(seed);
  VersionDataset ds;
  ds.project = config.project;
  ds.version = config.version;

  const std::size_t n_code = std::max<std::size_t>(1, (config.n_metrics * 54 + 32) / 65);
  for (std::size_t m = 0; m < config.n_metrics; ++m) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "metric%02zu", m);
    ds.manifest.names.emplace_back(buf);
    const std::size_t rest = config.n_metrics - n_code;
    MetricCategory cat = MetricCategory::code;
    if (m >= n_code) cat = (m - n_code) * 2 < rest ? MetricCategory::process : MetricCategory::ownership;
    ds.manifest.categories.push_back(cat);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<int> labels(n, 0);
  for (std::size_t i = 0; i < n_defective; ++i) labels[order[i]] = 1;

  ds.records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ModuleRecord rec;
    rec.file_id = file_name(i);
    rec.label = labels[i];
    rec.metrics.reserve(config.n_metrics);
    for (std::size_t m = 0; m < config.n_metrics; ++m) {
      const double shift = labels[i] == 1 ? config.feature_shift : 0.0;
      const double z = rng.normal() + shift;
      // Count-like scale, different per column.
      rec.metrics.push_back(10.0 * static_cast<double>(m + 1) + 3.0 * z);
    }
    ds.records.push_back(std::move(rec));
  }

  std::vector<std::size_t> view_order(n);
  std::iota(view_order.begin(), view_order.end(), std::size_t{0});
  rng.shuffle(std::span<std::size_t>(view_order));
  const auto n_cover = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::llround(config.view_coverage * static_cast<double>(n))));
  std::vector<bool> in_code(n, false), in_dev(n, false);
  for (std::size_t k = 0; k < std::min(n_cover, n); ++k) {
    in_code[view_order[k]] = true;
    in_dev[view_order[n - 1 - k]] = true;
  }
  std::vector<std::size_t> code_members[2];
  std::vector<std::size_t> code_nodes;
  for (std::size_t i = 0; i < n; ++i) {
    if (!in_code[i]) continue;
    code_members[labels[i]].push_back(i);
    code_nodes.push_back(i);
  }

  const auto n_edges =
      static_cast<std::size_t>(std::llround(config.mean_degree * static_cast<double>(code_nodes.size())));
  ds.dep_edges.reserve(n_edges);
  for (std::size_t e = 0; e < n_edges; ++e) {
    const std::size_t src = code_nodes[rng.index(code_nodes.size())];
    const int own = labels[src];
    const bool same = rng.bernoulli(config.homophily);
    const int target_class = same ? own : 1 - own;
    // Skipped rather than redirected so that homophily 1 keeps every edge within a class.
    if (code_members[target_class].empty() || (target_class == own && code_members[own].size() < 2)) continue;
    const std::size_t dst = draw_other(rng, code_members[target_class], src);
    RawDependencyEdge edge;
    edge.src = ds.records[src].file_id;
    edge.dst = ds.records[dst].file_id;
    edge.kind = rng.bernoulli(0.5) ? DependencyKind::data : DependencyKind::call;
    edge.count = 1 + static_cast<long long>(rng.index(5));
    ds.dep_edges.push_back(std::move(edge));
  }

  auto n_team1 = static_cast<std::size_t>(std::llround(config.defect_rate * static_cast<double>(config.n_developers)));
  n_team1 = std::clamp<std::size_t>(n_team1, 1, config.n_developers - 1);
  std::vector<std::size_t> teams[2];
  for (std::size_t d = 0; d < config.n_developers; ++d) teams[d < n_team1 ? 1 : 0].push_back(d);

  std::size_t private_devs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!in_dev[i]) {
      ds.ownership.push_back({ds.records[i].file_id, developer_name(config.n_developers + private_devs++)});
      continue;
    }
    std::set<std::size_t> devs;
    const std::size_t want = std::min(config.devs_per_file, config.n_developers);
    for (std::size_t attempt = 0; devs.size() < want && attempt < 64 * want; ++attempt) {
      const int team = rng.bernoulli(config.homophily) ? labels[i] : 1 - labels[i];
      devs.insert(teams[team][rng.index(teams[team].size())]);
    }
    for (std::size_t d : devs) ds.ownership.push_back({ds.records[i].file_id, developer_name(d)});
  }

  ds.validate();
  return ds;
}

}  // namespace mvdp::ingest
