#include "mvdp/sampling.hpp"

#include <cmath>
#include <limits>

#include "mvdp/csv.hpp"
#include "mvdp/error.hpp"

namespace mvdp::sampling {

SamplingRatio SamplingRatio::parse(std::string_view text) {
  if (text == "auto") return {};
  double m = 0.0;
  try {
    m = csv::parse_double(text, "sampling ratio");
  } catch (const ParseError&) {
    throw ConfigError("sampling ratio must be 'auto' or a positive number, got '" + std::string(text) + "'");
  }
  if (!(m > 0.0) || !std::isfinite(m)) throw ConfigError("sampling ratio must be positive");
  return times(m);
}

std::string SamplingRatio::to_string() const {
  return automatic ? std::string("auto") : csv::format_double(multiple);
}

void NodeMasks::validate(std::size_t n_nodes) const {
  if (train.size() != n_nodes || val.size() != n_nodes || test.size() != n_nodes) {
    throw ValidationError("split masks do not cover the " + std::to_string(n_nodes) + " graph nodes");
  }
  for (std::size_t i = 0; i < n_nodes; ++i) {
    if (int(train[i]) + int(val[i]) + int(test[i]) > 1) {
      throw ValidationError("node " + std::to_string(i) + " belongs to more than one split");
    }
  }
}

namespace {
std::vector<std::size_t> indices_of(const std::vector<bool>& mask) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) out.push_back(i);
  }
  return out;
}
}  // namespace

std::vector<std::size_t> NodeMasks::train_indices() const { return indices_of(train); }
std::vector<std::size_t> NodeMasks::val_indices() const { return indices_of(val); }
std::vector<std::size_t> NodeMasks::test_indices() const { return indices_of(test); }

std::size_t nearest_same_class(std::size_t v, std::span<const std::size_t> candidates,
                               const NodeFeatureMatrix& features) {
  const auto row_v = features.row(v);
  std::size_t best = std::numeric_limits<std::size_t>::max();
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t u : candidates) {
    if (u == v) continue;
    const auto row_u = features.row(u);
    double d2 = 0.0;
    for (std::size_t j = 0; j < row_v.size(); ++j) {
      const double diff = row_u[j] - row_v[j];
      d2 += diff * diff;
    }
    // Squared distance has the same argmin as the Euclidean distance.
    if (d2 < best_dist || (d2 == best_dist && u < best)) {
      best_dist = d2;
      best = u;
    }
  }
  if (best == std::numeric_limits<std::size_t>::max()) {
    throw SamplingError("node " + std::to_string(v) + " has no same-class training neighbor");
  }
  return best;
}

std::vector<double> synthesize_node(std::span<const double> v, std::span<const double> u, double delta) {
  if (v.size() != u.size()) {
    throw ShapeError("cannot interpolate feature rows of width " + std::to_string(v.size()) + " and " +
                     std::to_string(u.size()));
  }
  if (!(delta >= 0.0 && delta <= 1.0)) throw SamplingError("interpolation delta outside [0, 1]");
  std::vector<double> out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = (1.0 - delta) * v[j] + delta * u[j];
  return out;
}

AugmentedDataset without_augmentation(const graph::DependencyGraph& graph, const NodeFeatureMatrix& features,
                                      const std::vector<int>& labels, const NodeMasks& masks) {
  const std::size_t n = graph.node_count();
  if (features.rows() != n || labels.size() != n) {
    throw ShapeError("features/labels do not match the graph's " + std::to_string(n) + " nodes");
  }
  masks.validate(n);
  AugmentedDataset out;
  out.graph = graph;
  out.features = features;
  out.labels = labels;
  out.masks = masks;
  out.original_count = n;
  return out;
}

AugmentedDataset smote_augment(const graph::DependencyGraph& graph, const NodeFeatureMatrix& features,
                               const std::vector<int>& labels, const NodeMasks& masks,
                               const SamplingConfig& config, Rng& rng) {
  AugmentedDataset out = without_augmentation(graph, features, labels, masks);
  const std::size_t n = graph.node_count();

  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < n; ++i) {
    if (!masks.train[i]) continue;
    if (labels[i] != 0 && labels[i] != 1) throw SamplingError("labels must be binary");
    by_class[labels[i]].push_back(i);
  }
  const int minority = by_class[1].size() <= by_class[0].size() ? 1 : 0;
  out.minority_label = minority;
  const auto& minority_nodes = by_class[minority];
  const auto& majority_nodes = by_class[1 - minority];

  std::size_t n_synthetic = 0;
  if (config.ratio.automatic) {
    n_synthetic = majority_nodes.size() - minority_nodes.size();
  } else {
    n_synthetic = static_cast<std::size_t>(
        std::llround(config.ratio.multiple * static_cast<double>(minority_nodes.size())));
  }
  if (n_synthetic == 0) return out;
  if (minority_nodes.size() < 2) {
    throw SamplingError("minority class has " + std::to_string(minority_nodes.size()) +
                        " training nodes; at least 2 are required");
  }

  // Neighbor of each minority node, computed lazily.
  std::vector<std::size_t> neighbor_cache(n, std::numeric_limits<std::size_t>::max());

  const std::size_t width = features.cols();
  std::vector<double> values = features.values();
  values.reserve((n + n_synthetic) * width);
  std::vector<std::string> new_ids;
  new_ids.reserve(n_synthetic);
  graph::DependencyGraph::EdgeMap new_edges;
  std::vector<std::size_t> copies(n, 0);

  for (std::size_t k = 0; k < n_synthetic; ++k) {
    const std::size_t synthetic = n + k;
    const std::size_t source = minority_nodes[rng.index(minority_nodes.size())];
    if (neighbor_cache[source] == std::numeric_limits<std::size_t>::max()) {
      neighbor_cache[source] = nearest_same_class(source, minority_nodes, features);
    }
    const std::size_t neighbor = neighbor_cache[source];
    const double delta = rng.uniform_closed();
    const auto row = synthesize_node(features.row(source), features.row(neighbor), delta);
    values.insert(values.end(), row.begin(), row.end());

    new_ids.push_back(graph.node_ids()[source] + "#smote" + std::to_string(copies[source]++));
    for (const auto& nb : graph.incoming(source)) new_edges.emplace(std::make_pair(nb.node, synthetic), nb.weight);
    for (const auto& nb : graph.outgoing(source)) new_edges.emplace(std::make_pair(synthetic, nb.node), nb.weight);

    out.labels.push_back(labels[source]);
    out.masks.train.push_back(true);
    out.masks.val.push_back(false);
    out.masks.test.push_back(false);
    out.synthetic_origin.push_back({synthetic, source, neighbor, delta});
  }

  out.features = NodeFeatureMatrix(n + n_synthetic, width, std::move(values));
  out.graph = graph.with_added_nodes(new_ids, new_edges);
  return out;
}

}  // namespace mvdp::sampling
