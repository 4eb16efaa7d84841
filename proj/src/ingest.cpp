#include "mvdp/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "mvdp/csv.hpp"
#include "mvdp/error.hpp"

namespace mvdp::ingest {

using nlohmann::json;

std::string_view to_string(MetricCategory c) {
  switch (c) {
    case MetricCategory::code: return "code";
    case MetricCategory::process: return "process";
    case MetricCategory::ownership: return "ownership";
  }
  return "code";
}

MetricCategory parse_category(std::string_view text) {
  if (text == "code") return MetricCategory::code;
  if (text == "process") return MetricCategory::process;
  if (text == "ownership") return MetricCategory::ownership;
  throw ValidationError("unknown metric category '" + std::string(text) + "'");
}

std::string_view to_string(DependencyKind k) {
  return k == DependencyKind::data ? "data" : "call";
}

void MetricManifest::validate() const {
  if (categories.size() != names.size()) {
    throw ValidationError("manifest has " + std::to_string(names.size()) + " names but " +
                          std::to_string(categories.size()) + " categories");
  }
  std::unordered_set<std::string> seen;
  for (const auto& n : names) {
    if (n.empty()) throw ValidationError("manifest contains an empty metric name");
    if (n == "file" || n == "label") {
      throw ValidationError("metric name '" + n + "' collides with a reserved column");
    }
    if (!seen.insert(n).second) throw ValidationError("duplicate metric name '" + n + "'");
  }
}

double VersionDataset::defect_rate() const {
  if (records.empty()) return 0.0;
  std::size_t defective = 0;
  for (const auto& r : records) defective += r.label == 1 ? 1 : 0;
  return static_cast<double>(defective) / static_cast<double>(records.size());
}

void VersionDataset::validate() const {
  manifest.validate();
  std::unordered_set<std::string> ids;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.file_id.empty()) throw ValidationError("record " + std::to_string(i) + " has an empty file id");
    if (!ids.insert(r.file_id).second) throw ValidationError("duplicate file id '" + r.file_id + "'");
    if (r.metrics.size() != manifest.size()) {
      throw ValidationError("record '" + r.file_id + "' has " + std::to_string(r.metrics.size()) +
                            " metrics, manifest has " + std::to_string(manifest.size()));
    }
    if (r.label != 0 && r.label != 1) {
      throw ValidationError("record '" + r.file_id + "' has label " + std::to_string(r.label));
    }
  }
  for (const auto& e : dep_edges) {
    if (!ids.count(e.src)) throw ValidationError("dependency source '" + e.src + "' is not a known file");
    if (!ids.count(e.dst)) throw ValidationError("dependency target '" + e.dst + "' is not a known file");
    if (e.count < 1) throw ValidationError("dependency count must be >= 1");
  }
  for (const auto& o : ownership) {
    if (!ids.count(o.file_id)) {
      throw ValidationError("ownership file '" + o.file_id + "' is not a known file");
    }
  }
}

std::vector<std::string> VersionDataset::file_ids() const {
  std::vector<std::string> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.file_id);
  return out;
}

std::vector<int> VersionDataset::labels() const {
  std::vector<int> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.label);
  return out;
}

NodeFeatureMatrix VersionDataset::features() const {
  NodeFeatureMatrix m(records.size(), manifest.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::copy(records[i].metrics.begin(), records[i].metrics.end(), m.row(i).begin());
  }
  return m;
}

std::unordered_map<std::string, std::size_t> VersionDataset::index() const {
  std::unordered_map<std::string, std::size_t> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) out.emplace(records[i].file_id, i);
  return out;
}

ManifestFile load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  ManifestFile out;
  try {
    out.project = doc.value("project", "");
    out.version = doc.value("version", "");
    for (const auto& m : doc.at("metrics")) {
      out.manifest.names.push_back(m.at("name").get<std::string>());
      out.manifest.categories.push_back(parse_category(m.value("category", "code")));
    }
  } catch (const json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  out.manifest.validate();
  return out;
}

void save_manifest(const std::filesystem::path& path, const MetricManifest& manifest,
                   std::string_view project, std::string_view version) {
  json doc;
  if (!project.empty()) doc["project"] = project;
  if (!version.empty()) doc["version"] = version;
  doc["metrics"] = json::array();
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    doc["metrics"].push_back({{"name", manifest.names[i]},
                              {"category", std::string(to_string(manifest.categories[i]))}});
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

int require_column(const csv::Table& t, std::string_view name, std::string_view source) {
  const int c = t.column(name);
  if (c < 0) {
    throw SchemaError(std::string(source) + ": missing column '" + std::string(name) + "'");
  }
  return c;
}

}  // namespace

std::vector<ModuleRecord> parse_metrics_text(std::string_view text, const MetricManifest& manifest,
                                             std::string_view source_name) {
  manifest.validate();
  const csv::Table table = csv::parse(text, source_name);
  const int file_col = require_column(table, "file", source_name);
  const int label_col = require_column(table, "label", source_name);
  std::vector<int> metric_cols;
  metric_cols.reserve(manifest.size());
  for (const auto& name : manifest.names) metric_cols.push_back(require_column(table, name, source_name));
  if (table.header.size() != manifest.size() + 2) {
    for (const auto& h : table.header) {
      if (h != "file" && h != "label" &&
          std::find(manifest.names.begin(), manifest.names.end(), h) == manifest.names.end()) {
        throw SchemaError(std::string(source_name) + ": column '" + h + "' is not in the manifest");
      }
    }
    throw SchemaError(std::string(source_name) + ": duplicated header columns");
  }

  std::vector<ModuleRecord> records;
  records.reserve(table.rows.size());
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string where = std::string(source_name) + " row " + std::to_string(i + 1);
    ModuleRecord rec;
    rec.file_id = row[static_cast<std::size_t>(file_col)];
    if (rec.file_id.empty()) throw ValidationError(where + ": empty file id");
    if (!seen.insert(rec.file_id).second) {
      throw ValidationError(where + ": duplicate file id '" + rec.file_id + "'");
    }
    const auto& label = row[static_cast<std::size_t>(label_col)];
    if (label == "1") {
      rec.label = 1;
    } else if (label == "0") {
      rec.label = 0;
    } else {
      throw ParseError(where + ": label must be 0 or 1, got '" + label + "'");
    }
    rec.metrics.reserve(metric_cols.size());
    for (std::size_t m = 0; m < metric_cols.size(); ++m) {
      rec.metrics.push_back(csv::parse_double(row[static_cast<std::size_t>(metric_cols[m])],
                                              where + " column '" + manifest.names[m] + "'"));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<ModuleRecord> parse_metrics(const std::filesystem::path& path,
                                        const MetricManifest& manifest) {
  return parse_metrics_text(read_text(path), manifest, path.string());
}

std::vector<RawDependencyEdge> parse_dependencies_text(std::string_view text,
                                                       std::string_view source_name) {
  const csv::Table table = csv::parse(text, source_name);
  const int src_col = require_column(table, "src", source_name);
  const int dst_col = require_column(table, "dst", source_name);
  const int kind_col = require_column(table, "kind", source_name);
  const int count_col = require_column(table, "count", source_name);
  std::vector<RawDependencyEdge> edges;
  edges.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string where = std::string(source_name) + " row " + std::to_string(i + 1);
    RawDependencyEdge e;
    e.src = row[static_cast<std::size_t>(src_col)];
    e.dst = row[static_cast<std::size_t>(dst_col)];
    if (e.src.empty() || e.dst.empty()) throw ValidationError(where + ": empty endpoint");
    const auto& kind = row[static_cast<std::size_t>(kind_col)];
    if (kind == "data") {
      e.kind = DependencyKind::data;
    } else if (kind == "call") {
      e.kind = DependencyKind::call;
    } else {
      throw ValidationError(where + ": unknown dependency kind '" + kind + "'");
    }
    e.count = csv::parse_int(row[static_cast<std::size_t>(count_col)], where + " column 'count'");
    if (e.count <= 0) {
      throw ValidationError(where + ": dependency count must be positive, got " + std::to_string(e.count));
    }
    // Drop self-dependencies.
    if (e.src == e.dst) continue;
    edges.push_back(std::move(e));
  }
  return edges;
}

std::vector<RawDependencyEdge> parse_dependencies(const std::filesystem::path& path) {
  return parse_dependencies_text(read_text(path), path.string());
}

std::vector<OwnershipRecord> parse_ownership_text(std::string_view text, std::string_view source_name) {
  const csv::Table table = csv::parse(text, source_name);
  if (table.header.empty()) return {};
  const int file_col = require_column(table, "file", source_name);
  const int dev_col = require_column(table, "developer", source_name);
  std::vector<OwnershipRecord> out;
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::string where = std::string(source_name) + " row " + std::to_string(i + 1);
    OwnershipRecord rec{row[static_cast<std::size_t>(file_col)], row[static_cast<std::size_t>(dev_col)]};
    if (rec.file_id.empty()) throw ValidationError(where + ": empty file id");
    if (rec.developer_id.empty()) throw ValidationError(where + ": empty developer id");
    if (seen.emplace(rec.file_id, rec.developer_id).second) out.push_back(std::move(rec));
  }
  return out;
}

std::vector<OwnershipRecord> parse_ownership(const std::filesystem::path& path) {
  return parse_ownership_text(read_text(path), path.string());
}

void write_metrics(std::ostream& out, const MetricManifest& manifest,
                   const std::vector<ModuleRecord>& records) {
  std::vector<std::string> header{"file", "label"};
  header.insert(header.end(), manifest.names.begin(), manifest.names.end());
  csv::write_row(out, header);
  std::vector<std::string> fields;
  for (const auto& r : records) {
    fields.clear();
    fields.push_back(r.file_id);
    fields.push_back(std::to_string(r.label));
    for (double v : r.metrics) fields.push_back(csv::format_double(v));
    csv::write_row(out, fields);
  }
}

void write_dependencies(std::ostream& out, const std::vector<RawDependencyEdge>& edges) {
  csv::write_row(out, {"src", "dst", "kind", "count"});
  for (const auto& e : edges) {
    csv::write_row(out, {e.src, e.dst, std::string(to_string(e.kind)), std::to_string(e.count)});
  }
}

void write_ownership(std::ostream& out, const std::vector<OwnershipRecord>& records) {
  csv::write_row(out, {"file", "developer"});
  for (const auto& r : records) csv::write_row(out, {r.file_id, r.developer_id});
}

VersionDataset load_dataset(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IoError("dataset directory not found: " + dir.string());
  const auto manifest_path = dir / "manifest.json";
  const auto metrics_path = dir / "metrics.csv";
  const auto deps_path = dir / "deps.csv";
  const auto own_path = dir / "ownership.csv";
  for (const auto& p : {manifest_path, metrics_path, deps_path, own_path}) {
    if (!std::filesystem::exists(p)) throw IoError("missing input file " + p.string());
  }
  ManifestFile mf = load_manifest(manifest_path);
  VersionDataset ds;
  ds.manifest = std::move(mf.manifest);
  const auto dir_name = std::filesystem::absolute(dir).lexically_normal().filename().string();
  ds.project = mf.project.empty() ? (dir_name.empty() ? std::string("dataset") : dir_name) : mf.project;
  ds.version = mf.version.empty() ? std::string("0") : mf.version;
  ds.records = parse_metrics(metrics_path, ds.manifest);
  ds.dep_edges = parse_dependencies(deps_path);
  ds.ownership = parse_ownership(own_path);
  ds.validate();
  return ds;
}

void save_dataset(const VersionDataset& dataset, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  save_manifest(dir / "manifest.json", dataset.manifest, dataset.project, dataset.version);
  auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write " + p.string());
    return out;
  };
  {
    auto out = open(dir / "metrics.csv");
    write_metrics(out, dataset.manifest, dataset.records);
  }
  {
    auto out = open(dir / "deps.csv");
    write_dependencies(out, dataset.dep_edges);
  }
  {
    auto out = open(dir / "ownership.csv");
    write_ownership(out, dataset.ownership);
  }
}

VersionDataset normalize_metrics(VersionDataset dataset) {
  const std::size_t width = dataset.manifest.size();
  for (std::size_t c = 0; c < width; ++c) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& r : dataset.records) {
      lo = std::min(lo, r.metrics[c]);
      hi = std::max(hi, r.metrics[c]);
    }
    const double span = hi - lo;
    for (auto& r : dataset.records) {
      r.metrics[c] = span > 0.0 ? (r.metrics[c] - lo) / span : 0.0;
    }
  }
  return dataset;
}

}  // namespace mvdp::ingest
