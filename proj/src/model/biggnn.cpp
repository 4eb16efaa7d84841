#include <algorithm>
#include <array>
#include <cmath>

#include "mvdp/error.hpp"
#include "mvdp/model.hpp"

namespace mvdp::model {

using nn::Var;

void ModelConfig::validate() const {
  if (hidden_size < 1) throw ConfigError("hidden_size must be positive");
  if (graph_hops < 1) throw ConfigError("graph_hops must be at least 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
  for (std::size_t h : mlp_hidden) {
    if (h < 1) throw ConfigError("mlp_hidden layer sizes must be positive");
  }
  if (max_epochs < 1) throw ConfigError("max_epochs must be at least 1");
  if (!sampling_ratio.automatic && !(sampling_ratio.multiple > 0.0)) {
    throw ConfigError("sampling_ratio must be positive or auto");
  }
}

namespace {
template <typename T>
bool member(const std::vector<T>& set, const T& v) {
  return std::find(set.begin(), set.end(), v) != set.end();
}
}  // namespace

bool SearchSpace::contains(const ModelConfig& c) const {
  return member(hidden_size, c.hidden_size) && member(graph_hops, c.graph_hops) && member(lr, c.lr) &&
         member(batch_size, c.batch_size) && member(mlp_hidden, c.mlp_hidden) &&
         member(sampling_ratio, c.sampling_ratio);
}

void SearchSpace::require(const ModelConfig& c) const {
  if (!member(hidden_size, c.hidden_size)) throw ConfigError("hidden_size is not one of {16,32,64,128}");
  if (!member(graph_hops, c.graph_hops)) throw ConfigError("graph_hops is not one of {1,2,3,4}");
  if (!member(lr, c.lr)) throw ConfigError("lr is not one of {0.01,0.001,0.0005,0.0001}");
  if (!member(batch_size, c.batch_size)) throw ConfigError("batch_size is not one of {8,16,32}");
  if (!member(mlp_hidden, c.mlp_hidden)) throw ConfigError("mlp_hidden is not one of {[32,16],[64,32]}");
  if (!member(sampling_ratio, c.sampling_ratio)) throw ConfigError("sampling_ratio is not one of {0.5,1,2,3,auto}");
}

BiGGNNParams::BiGGNNParams(std::size_t input_dim, std::size_t hidden, std::span<const std::size_t> mlp_hidden,
                           Rng& rng)
    : input("input", input_dim, hidden, rng),
      fuse_weight("fuse.weight", nn::init_uniform(4 * hidden, hidden, rng)),
      fuse_bias("fuse.bias", Tensor(1, hidden)),
      gru("gru", hidden, hidden, rng),
      head("mlp", hidden, mlp_hidden, 2, rng) {}

std::vector<nn::Parameter*> BiGGNNParams::parameters() {
  std::vector<nn::Parameter*> out{&input.weight, &input.bias, &fuse_weight, &fuse_bias};
  for (auto* p : gru.parameters()) out.push_back(p);
  for (auto* p : head.parameters()) out.push_back(p);
  return out;
}

std::vector<const nn::Parameter*> BiGGNNParams::parameters() const {
  auto mutable_list = const_cast<BiGGNNParams*>(this)->parameters();
  return {mutable_list.begin(), mutable_list.end()};
}

Adjacency Adjacency::of(const graph::DependencyGraph& g) {
  Adjacency adj;
  const std::size_t n = g.node_count();
  adj.incoming.resize(n);
  adj.outgoing.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    adj.incoming[v].assign(g.incoming(v).begin(), g.incoming(v).end());
    adj.outgoing[v].assign(g.outgoing(v).begin(), g.outgoing(v).end());
  }
  return adj;
}

Var aggregate_directional(const Adjacency& adj, Var h, Direction direction, bool weighted) {
  return nn::neighbor_sum(h, direction == Direction::backward ? adj.incoming : adj.outgoing, weighted);
}

NodeFeatureMatrix aggregate_directional(const graph::DependencyGraph& g, const NodeFeatureMatrix& h,
                                        Direction direction, bool weighted) {
  if (h.rows() != g.node_count()) {
    throw ShapeError("aggregate: " + std::to_string(h.rows()) + " feature rows for " +
                     std::to_string(g.node_count()) + " nodes");
  }
  const Adjacency adj = Adjacency::of(g);
  nn::Tape tape;
  return aggregate_directional(adj, tape.constant(h), direction, weighted).value();
}

Var fuse(nn::Tape& tape, Var a, Var b, nn::Parameter& weight, nn::Parameter& bias) {
  const std::size_t hidden = a.value().cols();
  if (!a.value().same_shape(b.value())) {
    throw ShapeError("fuse: inputs " + shape_string(a.value()) + " and " + shape_string(b.value()));
  }
  if (weight.value.rows() != 4 * hidden || weight.value.cols() != hidden) {
    throw ShapeError("fuse: gate weight is " + shape_string(weight.value) + ", expected " +
                     std::to_string(4 * hidden) + "x" + std::to_string(hidden));
  }
  const std::array<Var, 4> features{a, b, nn::mul(a, b), nn::sub(a, b)};
  Var z = nn::sigmoid(nn::add_row(nn::matmul(nn::concat_cols(features), tape.parameter(weight)),
                                  tape.parameter(bias)));
  return nn::add(nn::mul(z, a), nn::mul(nn::affine(z, -1.0, 1.0), b));
}

ForwardOutput forward(nn::Tape& tape, const Adjacency& adj, const NodeFeatureMatrix& x, BiGGNNParams& params,
                      std::size_t hops, bool weighted) {
  if (x.rows() != adj.size()) {
    throw ShapeError("forward: " + std::to_string(x.rows()) + " feature rows for " + std::to_string(adj.size()) +
                     " nodes");
  }
  if (x.cols() != params.input.weight.value.rows()) {
    throw ShapeError("forward: feature width " + std::to_string(x.cols()) + ", model expects " +
                     std::to_string(params.input.weight.value.rows()));
  }
  Var h = params.input(tape, tape.constant(x));
  for (std::size_t k = 1; k <= hops; ++k) {
    Var backward = aggregate_directional(adj, h, Direction::backward, weighted);
    Var forward_agg = aggregate_directional(adj, h, Direction::forward, weighted);
    Var neighborhood = fuse(tape, backward, forward_agg, params.fuse_weight, params.fuse_bias);
    h = nn::gru_cell(tape, h, neighborhood, params.gru);
    if (!h.value().all_finite()) throw NumericError("non-finite node state at hop " + std::to_string(k));
  }
  Var probs = nn::softmax_rows(params.head(tape, h));
  if (!probs.value().all_finite()) throw NumericError("non-finite class probabilities");
  return {h, probs};
}

Prediction predict(const graph::DependencyGraph& g, const NodeFeatureMatrix& x, BiGGNNParams& params,
                   const ModelConfig& config) {
  const Adjacency adj = Adjacency::of(g);
  nn::Tape tape;
  auto out = forward(tape, adj, x, params, config.graph_hops, config.weighted_aggregation);
  return {out.probs.value(), out.hidden.value()};
}

}  // namespace mvdp::model
