#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "mvdp/graph.hpp"
#include "mvdp/rng.hpp"
#include "mvdp/tensor.hpp"

namespace mvdp::sampling {

// Target minority count as a multiple of the original minority-train count,
// or `automatic` to match the majority-train count.
struct SamplingRatio {
  bool automatic = true;
  double multiple = 1.0;

  static SamplingRatio parse(std::string_view text);  // "auto" or a positive real
  static SamplingRatio times(double m) { return {false, m}; }
  std::string to_string() const;
  friend bool operator==(const SamplingRatio&, const SamplingRatio&) = default;
};

struct SamplingConfig {
  SamplingRatio ratio;
};

struct NodeMasks {
  std::vector<bool> train;
  std::vector<bool> val;
  std::vector<bool> test;

  std::size_t size() const noexcept { return train.size(); }
  // Throws ValidationError when sizes differ or a node is in two splits.
  void validate(std::size_t n_nodes) const;
  std::vector<std::size_t> train_indices() const;
  std::vector<std::size_t> val_indices() const;
  std::vector<std::size_t> test_indices() const;
};

struct SyntheticOrigin {
  std::size_t node;      // index of the synthetic node
  std::size_t source;    // minority node it was drawn from
  std::size_t neighbor;  // nearest same-class training node
  double delta;
};

struct AugmentedDataset {
  graph::DependencyGraph graph;
  NodeFeatureMatrix features;
  std::vector<int> labels;
  NodeMasks masks;
  std::vector<SyntheticOrigin> synthetic_origin;
  std::size_t original_count = 0;  // synthetic nodes occupy [original_count, size)
  int minority_label = 1;

  std::size_t size() const noexcept { return labels.size(); }
};

// Closest candidate to row v by Euclidean distance, excluding v itself; ties go
// to the smallest node index. Throws SamplingError when no candidate remains.
std::size_t nearest_same_class(std::size_t v, std::span<const std::size_t> candidates,
                               const NodeFeatureMatrix& features);

// (1 - delta) * v + delta * u. Throws ShapeError on a width mismatch and
// SamplingError when delta is outside [0, 1].
std::vector<double> synthesize_node(std::span<const double> v, std::span<const double> u, double delta);

// Graph-aware SMOTE over the training split. Synthetic nodes are appended
// after the original nodes, belong to the training split only, and receive a
// copy of every incoming and outgoing edge of their source node.
AugmentedDataset smote_augment(const graph::DependencyGraph& graph, const NodeFeatureMatrix& features,
                               const std::vector<int>& labels, const NodeMasks& masks,
                               const SamplingConfig& config, Rng& rng);

// The unaugmented dataset in AugmentedDataset form.
AugmentedDataset without_augmentation(const graph::DependencyGraph& graph, const NodeFeatureMatrix& features,
                                      const std::vector<int>& labels, const NodeMasks& masks);

}  // namespace mvdp::sampling
