#include "mvdp/graph.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "mvdp/error.hpp"

namespace mvdp::graph {

std::string_view to_string(View v) {
  switch (v) {
    case View::CDG: return "CDG";
    case View::DDG: return "DDG";
    case View::MSDG: return "MSDG";
  }
  return "CDG";
}

View parse_view(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "cdg") return View::CDG;
  if (lower == "ddg") return View::DDG;
  if (lower == "msdg") return View::MSDG;
  throw ValidationError("unknown graph view '" + std::string(text) + "' (expected cdg, ddg or msdg)");
}

DependencyGraph::DependencyGraph(View view, std::vector<std::string> node_ids, EdgeMap edges, bool normalized,
                                 bool check_symmetry)
    : view_(view), normalized_(normalized), node_ids_(std::move(node_ids)), edges_(std::move(edges)) {
  const std::size_t n = node_ids_.size();
  index_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!index_.emplace(node_ids_[i], i).second) {
      throw ValidationError("duplicate graph node '" + node_ids_[i] + "'");
    }
  }
  outgoing_.assign(n, {});
  incoming_.assign(n, {});
  for (const auto& [key, w] : edges_) {
    const auto [s, d] = key;
    if (s >= n || d >= n) throw ValidationError("edge endpoint out of range");
    if (s == d) throw ValidationError("self loop on node '" + node_ids_[s] + "'");
    if (!(std::isfinite(w) && w > 0.0)) {
      throw ValidationError("edge " + node_ids_[s] + "->" + node_ids_[d] + " has non-positive weight");
    }
    // std::map iteration is ordered by (src, dst), so outgoing lists come out
    // sorted; incoming lists are sorted below.
    outgoing_[s].push_back({d, w});
    incoming_[d].push_back({s, w});
  }
  for (auto& list : incoming_) {
    std::sort(list.begin(), list.end(), [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
  }
  if (check_symmetry && view_ == View::DDG && !normalized_) {
    for (const auto& [key, w] : edges_) {
      auto it = edges_.find({key.second, key.first});
      if (it == edges_.end() || it->second != w) {
        throw ValidationError("DDG edge " + node_ids_[key.first] + "->" + node_ids_[key.second] +
                              " has no symmetric counterpart");
      }
    }
  }
}

std::optional<std::size_t> DependencyGraph::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double DependencyGraph::weight(std::size_t src, std::size_t dst) const {
  auto it = edges_.find({src, dst});
  return it == edges_.end() ? 0.0 : it->second;
}

double DependencyGraph::weight(std::string_view src, std::string_view dst) const {
  const auto s = index_of(src);
  const auto d = index_of(dst);
  if (!s || !d) return 0.0;
  return weight(*s, *d);
}

DependencyGraph DependencyGraph::with_added_nodes(const std::vector<std::string>& ids, const EdgeMap& extra) const {
  std::vector<std::string> nodes = node_ids_;
  nodes.insert(nodes.end(), ids.begin(), ids.end());
  EdgeMap edges = edges_;
  for (const auto& [key, w] : extra) edges[key] = w;
  return DependencyGraph(view_, std::move(nodes), std::move(edges), normalized_, false);
}

namespace {

std::unordered_map<std::string, std::size_t> index_records(const std::vector<ingest::ModuleRecord>& records) {
  std::unordered_map<std::string, std::size_t> idx;
  idx.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!idx.emplace(records[i].file_id, i).second) {
      throw ValidationError("duplicate file id '" + records[i].file_id + "'");
    }
  }
  return idx;
}

std::vector<std::string> ids_of(const std::vector<ingest::ModuleRecord>& records) {
  std::vector<std::string> ids;
  ids.reserve(records.size());
  for (const auto& r : records) ids.push_back(r.file_id);
  return ids;
}

}  // namespace

DependencyGraph build_cdg(const std::vector<ingest::ModuleRecord>& records,
                          const std::vector<ingest::RawDependencyEdge>& dep_edges) {
  const auto idx = index_records(records);
  DependencyGraph::EdgeMap edges;
  for (const auto& e : dep_edges) {
    auto s = idx.find(e.src);
    if (s == idx.end()) throw ValidationError("dependency source '" + e.src + "' does not resolve to a file");
    auto d = idx.find(e.dst);
    if (d == idx.end()) throw ValidationError("dependency target '" + e.dst + "' does not resolve to a file");
    if (e.count < 1) throw ValidationError("dependency count must be >= 1");
    if (s->second == d->second) continue;
    edges[{s->second, d->second}] += static_cast<double>(e.count);
  }
  return DependencyGraph(View::CDG, ids_of(records), std::move(edges));
}

DependencyGraph build_ddg(const std::vector<ingest::ModuleRecord>& records,
                          const std::vector<ingest::OwnershipRecord>& ownership) {
  const auto idx = index_records(records);
  std::map<std::string, std::set<std::size_t>> files_by_dev;
  for (const auto& o : ownership) {
    auto f = idx.find(o.file_id);
    if (f == idx.end()) throw ValidationError("ownership file '" + o.file_id + "' does not resolve to a file");
    files_by_dev[o.developer_id].insert(f->second);
  }
  DependencyGraph::EdgeMap edges;
  for (const auto& [dev, files] : files_by_dev) {
    for (auto a = files.begin(); a != files.end(); ++a) {
      for (auto b = std::next(a); b != files.end(); ++b) {
        edges[{*a, *b}] += 1.0;
        edges[{*b, *a}] += 1.0;
      }
    }
  }
  return DependencyGraph(View::DDG, ids_of(records), std::move(edges));
}

DependencyGraph build_msdg(const DependencyGraph& cdg, const DependencyGraph& ddg) {
  if (cdg.node_ids() != ddg.node_ids()) {
    throw ValidationError("cannot combine views over different node sets");
  }
  DependencyGraph::EdgeMap edges = cdg.edges();
  for (const auto& [key, w] : ddg.edges()) edges[key] += w;
  return DependencyGraph(View::MSDG, cdg.node_ids(), std::move(edges));
}

DependencyGraph normalize_edge_weights(const DependencyGraph& graph) {
  const std::size_t n = graph.node_count();
  std::vector<double> out_sum(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    for (const auto& nb : graph.outgoing(v)) out_sum[v] += nb.weight;
  }
  DependencyGraph::EdgeMap edges;
  for (const auto& [key, w] : graph.edges()) edges.emplace(key, w / out_sum[key.first]);
  return DependencyGraph(graph.view(), graph.node_ids(), std::move(edges), true);
}

DependencyGraph build_view(const ingest::VersionDataset& dataset, View view, const BuildOptions& options) {
  DependencyGraph g;
  switch (view) {
    case View::CDG:
      g = build_cdg(dataset.records, dataset.dep_edges);
      break;
    case View::DDG:
      g = build_ddg(dataset.records, dataset.ownership);
      break;
    case View::MSDG: {
      auto cdg = build_cdg(dataset.records, dataset.dep_edges);
      auto ddg = build_ddg(dataset.records, dataset.ownership);
      if (options.sum_normalized_views) {
        const auto nc = normalize_edge_weights(cdg);
        const auto nd = normalize_edge_weights(ddg);
        DependencyGraph::EdgeMap edges = nc.edges();
        for (const auto& [key, w] : nd.edges()) edges[key] += w;
        g = DependencyGraph(View::MSDG, cdg.node_ids(), std::move(edges));
      } else {
        g = build_msdg(cdg, ddg);
      }
      break;
    }
  }
  return options.normalize ? normalize_edge_weights(g) : g;
}

}  // namespace mvdp::graph
