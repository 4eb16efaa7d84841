#include <fstream>

#include <json.hpp>

#include "mvdp/csv.hpp"
#include "mvdp/error.hpp"
#include "mvdp/graph.hpp"

namespace mvdp::graph {

using nlohmann::json;

void export_graph(const DependencyGraph& graph, const std::filesystem::path& edges_csv,
                  const std::filesystem::path& sidecar_json) {
  {
    std::ofstream out(edges_csv, std::ios::binary);
    if (!out) throw IoError("cannot write " + edges_csv.string());
    csv::write_row(out, {"src", "dst", "weight"});
    const auto& ids = graph.node_ids();
    for (const auto& [key, w] : graph.edges()) {
      csv::write_row(out, {ids[key.first], ids[key.second], csv::format_double(w)});
    }
  }
  json doc;
  doc["format"] = "mvdp-graph";
  doc["version"] = 1;
  doc["view"] = std::string(to_string(graph.view()));
  doc["normalized"] = graph.normalized();
  doc["edges"] = edges_csv.filename().string();
  doc["nodes"] = graph.node_ids();
  std::ofstream out(sidecar_json, std::ios::binary);
  if (!out) throw IoError("cannot write " + sidecar_json.string());
  out << doc.dump(2) << '\n';
}

DependencyGraph import_graph(const std::filesystem::path& sidecar_json) {
  std::ifstream in(sidecar_json);
  if (!in) throw IoError("cannot open " + sidecar_json.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(sidecar_json.string() + ": " + e.what());
  }
  View view;
  bool normalized = false;
  std::vector<std::string> nodes;
  std::filesystem::path edges_path;
  try {
    view = parse_view(doc.at("view").get<std::string>());
    normalized = doc.value("normalized", false);
    nodes = doc.at("nodes").get<std::vector<std::string>>();
    edges_path = sidecar_json.parent_path() / doc.at("edges").get<std::string>();
  } catch (const json::exception& e) {
    throw SchemaError(sidecar_json.string() + ": " + e.what());
  }
  std::unordered_map<std::string, std::size_t> idx;
  for (std::size_t i = 0; i < nodes.size(); ++i) idx.emplace(nodes[i], i);

  const auto table = csv::read(edges_path);
  const int s_col = table.column("src");
  const int d_col = table.column("dst");
  const int w_col = table.column("weight");
  if (s_col < 0 || d_col < 0 || w_col < 0) {
    throw SchemaError(edges_path.string() + ": expected header src,dst,weight");
  }
  DependencyGraph::EdgeMap edges;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    auto s = idx.find(row[static_cast<std::size_t>(s_col)]);
    auto d = idx.find(row[static_cast<std::size_t>(d_col)]);
    if (s == idx.end() || d == idx.end()) {
      throw ValidationError(edges_path.string() + " row " + std::to_string(r + 1) + ": unknown node");
    }
    const double w = csv::parse_double(row[static_cast<std::size_t>(w_col)],
                                       edges_path.string() + " row " + std::to_string(r + 1));
    if (!edges.emplace(std::make_pair(s->second, d->second), w).second) {
      throw ValidationError(edges_path.string() + " row " + std::to_string(r + 1) + ": duplicate edge");
    }
  }
  return DependencyGraph(view, std::move(nodes), std::move(edges), normalized);
}

}  // namespace mvdp::graph
