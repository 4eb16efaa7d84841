#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mvdp/tensor.hpp"

namespace mvdp::ingest {

enum class MetricCategory { code, process, ownership };

std::string_view to_string(MetricCategory c);
MetricCategory parse_category(std::string_view text);

struct MetricManifest {
  std::vector<std::string> names;
  std::vector<MetricCategory> categories;

  std::size_t size() const noexcept { return names.size(); }
  // Throws ValidationError on duplicate names or a length mismatch.
  void validate() const;

  friend bool operator==(const MetricManifest&, const MetricManifest&) = default;
};

struct ModuleRecord {
  std::string file_id;
  std::vector<double> metrics;
  int label = 0;  // 1 = defective

  friend bool operator==(const ModuleRecord&, const ModuleRecord&) = default;
};

enum class DependencyKind { data, call };

std::string_view to_string(DependencyKind k);

struct RawDependencyEdge {
  std::string src;
  std::string dst;
  DependencyKind kind = DependencyKind::call;
  long long count = 1;

  friend bool operator==(const RawDependencyEdge&, const RawDependencyEdge&) = default;
};

struct OwnershipRecord {
  std::string file_id;
  std::string developer_id;

  friend bool operator==(const OwnershipRecord&, const OwnershipRecord&) = default;
};

// One project version: metric rows, labels and the raw records the graph
// views are built from.
struct VersionDataset {
  std::string project;
  std::string version;
  MetricManifest manifest;
  std::vector<ModuleRecord> records;
  std::vector<RawDependencyEdge> dep_edges;
  std::vector<OwnershipRecord> ownership;

  std::size_t size() const noexcept { return records.size(); }
  double defect_rate() const;
  std::string name() const { return project + "-" + version; }

  // Checks ids, metric widths, labels and that every dependency/ownership
  // file id resolves to a record. Throws ValidationError.
  void validate() const;

  std::vector<std::string> file_ids() const;
  std::vector<int> labels() const;
  NodeFeatureMatrix features() const;
  std::unordered_map<std::string, std::size_t> index() const;

  friend bool operator==(const VersionDataset&, const VersionDataset&) = default;
};

// manifest.json: {"project": ..., "version": ..., "metrics": [{"name", "category"}]}.
// project and version are optional.
struct ManifestFile {
  MetricManifest manifest;
  std::string project;
  std::string version;
};
ManifestFile load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path, const MetricManifest& manifest,
                   std::string_view project = {}, std::string_view version = {});

std::vector<ModuleRecord> parse_metrics(const std::filesystem::path& path,
                                        const MetricManifest& manifest);
std::vector<ModuleRecord> parse_metrics_text(std::string_view text, const MetricManifest& manifest,
                                             std::string_view source_name = "metrics.csv");
std::vector<RawDependencyEdge> parse_dependencies(const std::filesystem::path& path);
std::vector<RawDependencyEdge> parse_dependencies_text(std::string_view text,
                                                       std::string_view source_name = "deps.csv");
std::vector<OwnershipRecord> parse_ownership(const std::filesystem::path& path);
std::vector<OwnershipRecord> parse_ownership_text(std::string_view text,
                                                  std::string_view source_name = "ownership.csv");

void write_metrics(std::ostream& out, const MetricManifest& manifest,
                   const std::vector<ModuleRecord>& records);
void write_dependencies(std::ostream& out, const std::vector<RawDependencyEdge>& edges);
void write_ownership(std::ostream& out, const std::vector<OwnershipRecord>& records);

// Dataset directory layout: manifest.json, metrics.csv, deps.csv, ownership.csv.
// Missing files raise IoError naming the path. project/version default to the
// directory name when absent from the manifest.
VersionDataset load_dataset(const std::filesystem::path& dir);
void save_dataset(const VersionDataset& dataset, const std::filesystem::path& dir);

// Per-column min-max scaling over the version; constant columns become 0.
VersionDataset normalize_metrics(VersionDataset dataset);

struct SyntheticConfig {
  std::size_t n_nodes = 300;
  double defect_rate = 0.15;
  double homophily = 0.9;
  std::size_t n_developers = 100;
  double mean_degree = 3.0;  // dependency edges per node
  std::size_t n_metrics = 12;
  // Extra knobs beyond the core planted-partition parameters.
  double feature_shift = 0.5;  // mean offset (in stddevs) of defective metric rows
  std::size_t devs_per_file = 1;
  // Fraction of files taking part in each view. The code view covers the first
  // share of a random file order and the developer view the last share, so
  // values below 1 make the two views complementary. Files outside the
  // developer view get a private developer.
  double view_coverage = 1.0;
  std::string project = "synthetic";
  std::string version = "1.0";
};

// Planted-partition generator. Labels are planted at defect_rate; each
// dependency edge joins same-label files with probability `homophily`; each
// developer belongs to a label team and each file draws its developers from its
// own team with probability `homophily`. Throws ConfigError on infeasible
// configurations.
VersionDataset generate_synthetic(const SyntheticConfig& config, std::uint64_t seed);

}  // namespace mvdp::ingest
