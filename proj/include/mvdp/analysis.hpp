#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "mvdp/graph.hpp"
#include "mvdp/tensor.hpp"

namespace mvdp::analysis {

struct NeighborShareReport {
  std::vector<double> per_node;  // P(v)
  double total = 0.0;            // mean of P(v) over all nodes
};

// P(v) = (outgoing weight to same-label successors) / (total outgoing weight),
// or 0 for a node without outgoing edges. Incoming edges do not count.
// Throws ValidationError when labels do not cover every node.
NeighborShareReport same_label_weight_share(const graph::DependencyGraph& graph, const std::vector<int>& labels);

struct SeparabilityReport {
  double distance = 0.0;
  std::size_t n_defective = 0;
  std::size_t n_clean = 0;
};

// Mean Euclidean distance over all (defective, clean) row pairs. Unless
// `already_normalized`, each row is first min-max scaled to [0, 1] (constant
// rows become zeros). Throws AnalysisError unless both classes are present.
SeparabilityReport interclass_distance(const NodeFeatureMatrix& features, const std::vector<int>& labels,
                                       bool already_normalized = false);

nlohmann::json to_json(const NeighborShareReport& r, const std::vector<std::string>& node_ids);
nlohmann::json to_json(const SeparabilityReport& r);

// One row per version: `version,<column>...`, e.g. the P_total of each view.
struct TableRow {
  std::string version;
  std::vector<double> values;
};
void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
                     const std::vector<TableRow>& rows);

}  // namespace mvdp::analysis
