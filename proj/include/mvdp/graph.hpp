#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mvdp/ingest.hpp"

namespace mvdp::graph {

enum class View { CDG, DDG, MSDG };

std::string_view to_string(View v);
// Accepts "cdg"/"CDG" etc. Throws ValidationError otherwise.
View parse_view(std::string_view text);

struct Neighbor {
  std::size_t node;
  double weight;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Directed weighted graph over file nodes. Immutable once constructed.
//
// Invariants (checked by the constructor, ValidationError on failure):
//   - no self loops, every weight finite and > 0, endpoints in range;
//   - un-normalized DDG graphs are symmetric with equal weights (unless
//     check_symmetry is false, as for SMOTE-augmented copies).
// Neighbor lists are sorted by node index.
class DependencyGraph {
 public:
  using EdgeMap = std::map<std::pair<std::size_t, std::size_t>, double>;

  DependencyGraph() = default;
  DependencyGraph(View view, std::vector<std::string> node_ids, EdgeMap edges, bool normalized = false,
                  bool check_symmetry = true);

  View view() const noexcept { return view_; }
  bool normalized() const noexcept { return normalized_; }
  const std::vector<std::string>& node_ids() const noexcept { return node_ids_; }
  std::size_t node_count() const noexcept { return node_ids_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const EdgeMap& edges() const noexcept { return edges_; }

  std::span<const Neighbor> outgoing(std::size_t v) const { return outgoing_.at(v); }
  std::span<const Neighbor> incoming(std::size_t v) const { return incoming_.at(v); }

  std::optional<std::size_t> index_of(std::string_view id) const;
  // 0 when the edge is absent.
  double weight(std::size_t src, std::size_t dst) const;
  double weight(std::string_view src, std::string_view dst) const;

  // Copy with `ids` appended as new nodes and `extra` edges added; the extra
  // edges may reference both old and new node indices.
  DependencyGraph with_added_nodes(const std::vector<std::string>& ids, const EdgeMap& extra) const;

  friend bool operator==(const DependencyGraph& a, const DependencyGraph& b) {
    return a.view_ == b.view_ && a.normalized_ == b.normalized_ && a.node_ids_ == b.node_ids_ &&
           a.edges_ == b.edges_;
  }

 private:
  View view_ = View::CDG;
  bool normalized_ = false;
  std::vector<std::string> node_ids_;
  EdgeMap edges_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::vector<Neighbor>> outgoing_;
  std::vector<std::vector<Neighbor>> incoming_;
};

// Weight(A,B) = number of data dependencies + number of call dependencies.
// Self dependencies are ignored; unresolved endpoints throw ValidationError.
DependencyGraph build_cdg(const std::vector<ingest::ModuleRecord>& records,
                          const std::vector<ingest::RawDependencyEdge>& dep_edges);

// Weight(A,B) = Weight(B,A) = number of developers shared by A and B.
DependencyGraph build_ddg(const std::vector<ingest::ModuleRecord>& records,
                          const std::vector<ingest::OwnershipRecord>& ownership);

// Edge-wise sum of the two views; node sequences must be identical.
DependencyGraph build_msdg(const DependencyGraph& cdg, const DependencyGraph& ddg);

// Divides each outgoing weight by the node's outgoing-weight sum.
DependencyGraph normalize_edge_weights(const DependencyGraph& graph);

struct BuildOptions {
  bool normalize = true;
  // Sum the normalized CDG and DDG (instead of raw weights) before the final
  // normalization; a sensitivity variant for the MSDG.
  bool sum_normalized_views = false;
};

DependencyGraph build_view(const ingest::VersionDataset& dataset, View view, const BuildOptions& options = {});

// Edge list `src,dst,weight` (file ids, shortest round-trip weights) plus a JSON
// sidecar {"format", "view", "normalized", "edges", "nodes"}.
void export_graph(const DependencyGraph& graph, const std::filesystem::path& edges_csv,
                  const std::filesystem::path& sidecar_json);
DependencyGraph import_graph(const std::filesystem::path& sidecar_json);

}  // namespace mvdp::graph
