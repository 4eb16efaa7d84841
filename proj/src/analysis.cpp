#include "mvdp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "mvdp/csv.hpp"
#include "mvdp/error.hpp"

namespace mvdp::analysis {

NeighborShareReport same_label_weight_share(const graph::DependencyGraph& graph, const std::vector<int>& labels) {
  const std::size_t n = graph.node_count();
  if (labels.size() != n) {
    throw ValidationError("got " + std::to_string(labels.size()) + " labels for " + std::to_string(n) + " nodes");
  }
  NeighborShareReport r;
  r.per_node.assign(n, 0.0);
  double sum = 0.0;
  for (std::size_t v = 0; v < n; ++v) {
    double w1 = 0.0;
    double w2 = 0.0;
    for (const auto& nb : graph.outgoing(v)) {
      w1 += nb.weight;
      if (labels[nb.node] == labels[v]) w2 += nb.weight;
    }
    r.per_node[v] = w1 != 0.0 ? w2 / w1 : 0.0;
    sum += r.per_node[v];
  }
  r.total = n > 0 ? sum / static_cast<double>(n) : 0.0;
  return r;
}

namespace {
std::vector<double> scaled_row(std::span<const double> row) {
  std::vector<double> out(row.begin(), row.end());
  if (out.empty()) return out;
  const auto [lo, hi] = std::minmax_element(out.begin(), out.end());
  const double min = *lo;
  const double range = *hi - *lo;
  for (double& x : out) x = range > 0.0 ? (x - min) / range : 0.0;
  return out;
}
}  // namespace

SeparabilityReport interclass_distance(const NodeFeatureMatrix& features, const std::vector<int>& labels,
                                       bool already_normalized) {
  if (labels.size() != features.rows()) {
    throw AnalysisError("got " + std::to_string(labels.size()) + " labels for " + std::to_string(features.rows()) +
                        " feature rows");
  }
  std::vector<std::vector<double>> defective, clean;
  for (std::size_t i = 0; i < features.rows(); ++i) {
    std::vector<double> row = already_normalized ? std::vector<double>(features.row(i).begin(), features.row(i).end())
                                                 : scaled_row(features.row(i));
    (labels[i] == 1 ? defective : clean).push_back(std::move(row));
  }
  if (defective.empty() || clean.empty()) {
    throw AnalysisError("inter-class distance needs both defective and clean rows (got " +
                        std::to_string(defective.size()) + " and " + std::to_string(clean.size()) + ")");
  }
  double total = 0.0;
  for (const auto& d : defective) {
    for (const auto& c : clean) {
      double sq = 0.0;
      for (std::size_t k = 0; k < d.size(); ++k) sq += (d[k] - c[k]) * (d[k] - c[k]);
      total += std::sqrt(sq);
    }
  }
  SeparabilityReport r;
  r.n_defective = defective.size();
  r.n_clean = clean.size();
  r.distance = total / (static_cast<double>(r.n_defective) * static_cast<double>(r.n_clean));
  return r;
}

nlohmann::json to_json(const NeighborShareReport& r, const std::vector<std::string>& node_ids) {
  nlohmann::json nodes = nlohmann::json::array();
  for (std::size_t v = 0; v < r.per_node.size(); ++v) {
    nodes.push_back({{"file", v < node_ids.size() ? node_ids[v] : std::to_string(v)}, {"p", r.per_node[v]}});
  }
  return {{"p_total", r.total}, {"nodes", std::move(nodes)}};
}

nlohmann::json to_json(const SeparabilityReport& r) {
  return {{"distance", r.distance}, {"n_defective", r.n_defective}, {"n_clean", r.n_clean}};
}

void write_table_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
                     const std::vector<TableRow>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  std::vector<std::string> header{"version"};
  header.insert(header.end(), columns.begin(), columns.end());
  csv::write_row(out, header);
  for (const auto& row : rows) {
    std::vector<std::string> fields{row.version};
    for (double v : row.values) fields.push_back(csv::format_double(v));
    csv::write_row(out, fields);
  }
}

}  // namespace mvdp::analysis
