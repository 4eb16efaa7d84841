#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mvdp/graph.hpp"
#include "mvdp/nn/autodiff.hpp"
#include "mvdp/nn/layers.hpp"
#include "mvdp/rng.hpp"
#include "mvdp/sampling.hpp"

namespace mvdp::model {

struct ModelConfig {
  std::size_t hidden_size = 32;
  std::size_t graph_hops = 2;
  double lr = 0.01;
  std::size_t batch_size = 32;
  std::vector<std::size_t> mlp_hidden{32, 16};
  sampling::SamplingRatio sampling_ratio;  // auto
  std::size_t max_epochs = 100;
  std::uint64_t seed = 0;
  bool use_smote = true;
  // Scale neighbor sums by (normalized) edge weight instead of plain sums.
  bool weighted_aggregation = false;

  // Structural checks (positive sizes, hops >= 1, ...). Throws ConfigError.
  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Value sets of the tunable hyperparameters.
struct SearchSpace {
  std::vector<std::size_t> hidden_size{16, 32, 64, 128};
  std::vector<std::size_t> graph_hops{1, 2, 3, 4};
  std::vector<double> lr{0.01, 0.001, 0.0005, 0.0001};
  std::vector<std::size_t> batch_size{8, 16, 32};
  std::vector<std::vector<std::size_t>> mlp_hidden{{32, 16}, {64, 32}};
  std::vector<sampling::SamplingRatio> sampling_ratio{
      sampling::SamplingRatio::times(0.5), sampling::SamplingRatio::times(1.0),
      sampling::SamplingRatio::times(2.0), sampling::SamplingRatio::times(3.0), sampling::SamplingRatio{}};

  bool contains(const ModelConfig& c) const;
  // Throws ConfigError naming the first field outside its value set.
  void require(const ModelConfig& c) const;
};

// All learnable parameters. The gate and GRU weights are shared by every hop.
struct BiGGNNParams {
  nn::Linear input;         // metrics -> hidden
  nn::Parameter fuse_weight;  // (4 * hidden) x hidden
  nn::Parameter fuse_bias;    // 1 x hidden
  nn::GruParams gru;
  nn::Mlp head;             // hidden -> mlp_hidden... -> 2

  BiGGNNParams() = default;
  BiGGNNParams(std::size_t input_dim, std::size_t hidden, std::span<const std::size_t> mlp_hidden, Rng& rng);

  std::vector<nn::Parameter*> parameters();
  std::vector<const nn::Parameter*> parameters() const;
};

// Neighbor lists in both directions, materialized once per graph.
struct Adjacency {
  std::vector<std::vector<graph::Neighbor>> incoming;  // backward direction
  std::vector<std::vector<graph::Neighbor>> outgoing;  // forward direction

  static Adjacency of(const graph::DependencyGraph& g);
  std::size_t size() const noexcept { return incoming.size(); }
};

enum class Direction { backward, forward };

// Row v = sum of H rows over v's in-neighbors (backward) or out-neighbors
// (forward); nodes without such neighbors get zeros.
nn::Var aggregate_directional(const Adjacency& adj, nn::Var h, Direction direction, bool weighted = false);
NodeFeatureMatrix aggregate_directional(const graph::DependencyGraph& g, const NodeFeatureMatrix& h,
                                        Direction direction, bool weighted = false);

// z = sigmoid([a; b; a*b; a-b] W + bias); z * a + (1 - z) * b.
nn::Var fuse(nn::Tape& tape, nn::Var a, nn::Var b, nn::Parameter& weight, nn::Parameter& bias);

struct ForwardOutput {
  nn::Var hidden;  // node representations after the last hop
  nn::Var probs;   // n x 2, column 1 = defective
};

// Projection, `hops` rounds of bidirectional aggregation + fusion + GRU update,
// then MLP and softmax. Throws NumericError naming the hop on a non-finite
// activation.
ForwardOutput forward(nn::Tape& tape, const Adjacency& adj, const NodeFeatureMatrix& x, BiGGNNParams& params,
                      std::size_t hops, bool weighted = false);

struct Prediction {
  Tensor probs;
  Tensor hidden;
};
Prediction predict(const graph::DependencyGraph& g, const NodeFeatureMatrix& x, BiGGNNParams& params,
                   const ModelConfig& config);

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> val_metric;
  std::string val_metric_name = "auc";  // "neg_loss" when validation is single-class
  std::size_t selected_epoch = 0;       // 1-based
};

struct TrainResult {
  BiGGNNParams params;  // snapshot at the selected epoch
  TrainHistory history;
  sampling::AugmentedDataset data;  // the graph the model was trained on
};

// SMOTE-augments the training split (when enabled), then trains with Adam on
// mini-batches of training nodes while message passing runs over the full
// graph. The returned parameters are those of the epoch with the best
// validation metric (earliest on ties).
TrainResult train(const graph::DependencyGraph& g, const NodeFeatureMatrix& x, const std::vector<int>& labels,
                  const sampling::NodeMasks& masks, const ModelConfig& config, Rng& rng);

struct SearchTrial {
  ModelConfig config;
  double score = 0.0;
};
struct SearchResult {
  ModelConfig best;
  double best_score = 0.0;
  std::vector<SearchTrial> trials;
};

// Draws `budget` configurations uniformly from the product of the value sets
// (other fields copied from `base`) and keeps the best score, first on ties.
ModelConfig sample_config(const SearchSpace& space, const ModelConfig& base, Rng& rng);
SearchResult random_search(const SearchSpace& space, const ModelConfig& base, std::size_t budget,
                           const std::function<double(const ModelConfig&)>& eval_fn, Rng& rng);

}  // namespace mvdp::model
