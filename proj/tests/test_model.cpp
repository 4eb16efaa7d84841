#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "mvdp/error.hpp"
#include "mvdp/model.hpp"
#include "mvdp/nn/optim.hpp"
#include "support.hpp"

using namespace mvdp;
using namespace mvdp::model;

namespace {

NodeFeatureMatrix random_features(std::size_t n, std::size_t d, Rng& rng) {
  NodeFeatureMatrix x(n, d);
  for (double& v : x.values()) v = rng.uniform();
  return x;
}

graph::DependencyGraph permuted(const graph::DependencyGraph& g, const std::vector<std::size_t>& perm) {
  std::vector<std::string> ids(g.node_count());
  for (std::size_t i = 0; i < perm.size(); ++i) ids[perm[i]] = g.node_ids()[i];
  graph::DependencyGraph::EdgeMap e;
  for (const auto& [key, w] : g.edges()) e[{perm[key.first], perm[key.second]}] = w;
  return graph::DependencyGraph(g.view(), ids, e, g.normalized(), false);
}

graph::DependencyGraph reversed(const graph::DependencyGraph& g) {
  graph::DependencyGraph::EdgeMap e;
  for (const auto& [key, w] : g.edges()) e[{key.second, key.first}] = w;
  return graph::DependencyGraph(g.view(), g.node_ids(), e, g.normalized(), false);
}

// Two planted communities; features carry a weak label signal.
struct Planted {
  graph::DependencyGraph g;
  NodeFeatureMatrix x;
  std::vector<int> labels;
};

Planted planted(std::size_t n, Rng& rng) {
  Planted p;
  p.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) p.labels[i] = i < n / 2 ? 1 : 0;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("f" + std::to_string(i));
  graph::DependencyGraph::EdgeMap e;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b && p.labels[a] == p.labels[b] && rng.bernoulli(0.3)) e[{a, b}] = 1.0;
    }
  }
  p.g = graph::normalize_edge_weights(graph::DependencyGraph(graph::View::CDG, ids, e));
  p.x = NodeFeatureMatrix(n, 4);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < 4; ++k) p.x(i, k) = rng.uniform() + 0.3 * p.labels[i];
  }
  return p;
}

sampling::NodeMasks split_masks(std::size_t n, std::size_t every_val, std::size_t every_test) {
  sampling::NodeMasks m{std::vector<bool>(n, false), std::vector<bool>(n, false), std::vector<bool>(n, false)};
  for (std::size_t i = 0; i < n; ++i) {
    if (every_val && i % every_val == 1) {
      m.val[i] = true;
    } else if (every_test && i % every_test == 2) {
      m.test[i] = true;
    } else {
      m.train[i] = true;
    }
  }
  return m;
}

}  // namespace

TEST(Aggregate, DirectionalSums) {
  std::vector<std::string> ids{"v", "a", "b", "iso"};
  const graph::DependencyGraph g(graph::View::CDG, ids, {{{0, 1}, 0.25}, {{0, 2}, 0.75}, {{1, 0}, 1.0}});
  const NodeFeatureMatrix h(4, 2, {9, 9, 1, 0, 0, 1, 5, 5});
  const auto fwd = aggregate_directional(g, h, Direction::forward);
  EXPECT_EQ(fwd(0, 0), 1.0);
  EXPECT_EQ(fwd(0, 1), 1.0);
  EXPECT_EQ(fwd(1, 0), 9.0);
  EXPECT_EQ(fwd(3, 0), 0.0);
  const auto bwd = aggregate_directional(g, h, Direction::backward);
  EXPECT_EQ(bwd(2, 0), 9.0);
  EXPECT_EQ(bwd(0, 0), 1.0);
  EXPECT_EQ(bwd(3, 1), 0.0);
  const auto weighted = aggregate_directional(g, h, Direction::forward, true);
  EXPECT_DOUBLE_EQ(weighted(0, 0), 0.25);
  EXPECT_THROW(aggregate_directional(g, NodeFeatureMatrix(3, 2), Direction::forward), ShapeError);
}

TEST(Aggregate, ReversingEdgesSwapsDirections) {
  Rng rng(1);
  const auto g = support::random_graph(10, 0.3, rng);
  const auto h = random_features(10, 3, rng);
  const auto r = reversed(g);
  EXPECT_EQ(aggregate_directional(g, h, Direction::forward), aggregate_directional(r, h, Direction::backward));
  EXPECT_EQ(aggregate_directional(g, h, Direction::backward), aggregate_directional(r, h, Direction::forward));
}

TEST(Fuse, Identities) {
  nn::Parameter w("w", Tensor(8, 2));
  nn::Parameter b("b", Tensor(1, 2));
  nn::Tape tape;
  const Tensor a(1, 2, {1.0, 3.0});
  const Tensor c(1, 2, {5.0, -1.0});
  const auto mean = fuse(tape, tape.constant(a), tape.constant(c), w, b);
  EXPECT_DOUBLE_EQ(mean.value()(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(mean.value()(0, 1), 1.0);

  Rng rng(2);
  for (double& v : w.value.values()) v = rng.uniform(-1, 1);
  const auto same = fuse(tape, tape.constant(a), tape.constant(a), w, b);
  EXPECT_NEAR(same.value()(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(same.value()(0, 1), 3.0, 1e-15);

  w.value.fill(0.0);
  b.value = Tensor(1, 2, {10.0, -10.0});
  const auto sat = fuse(tape, tape.constant(a), tape.constant(c), w, b);
  EXPECT_NEAR(sat.value()(0, 0), 1.0, 1e-3);
  EXPECT_NEAR(sat.value()(0, 1), -1.0, 1e-3);
  EXPECT_THROW(fuse(tape, tape.constant(a), tape.constant(Tensor(1, 3)), w, b), ShapeError);
}

TEST(Forward, ZeroGruHalvesProjection) {
  std::vector<std::string> ids{"a", "b"};
  const graph::DependencyGraph g(graph::View::CDG, ids, {{{0, 1}, 1.0}});
  Rng rng(3);
  const auto x = random_features(2, 3, rng);
  BiGGNNParams p(3, 4, std::vector<std::size_t>{32, 16}, rng);
  for (auto* q : p.gru.parameters()) q->value.fill(0.0);
  nn::Tape tape;
  const auto out = forward(tape, Adjacency::of(g), x, p, 1);
  nn::Tape t2;
  const Tensor h0 = p.input(t2, t2.constant(x)).value();
  for (std::size_t i = 0; i < h0.size(); ++i) EXPECT_DOUBLE_EQ(out.hidden.value()[i], 0.5 * h0[i]);
}

TEST(Forward, RowsSumToOneAndPermutationEquivariant) {
  Rng rng(4);
  const auto g = graph::normalize_edge_weights(support::random_graph(12, 0.25, rng));
  const auto x = random_features(12, 5, rng);
  BiGGNNParams p(5, 8, std::vector<std::size_t>{32, 16}, rng);
  ModelConfig c;
  c.graph_hops = 3;
  const auto base = predict(g, x, p, c);
  for (std::size_t r = 0; r < 12; ++r) EXPECT_NEAR(base.probs(r, 0) + base.probs(r, 1), 1.0, 1e-9);

  std::vector<std::size_t> perm(12);
  for (std::size_t i = 0; i < 12; ++i) perm[i] = (i * 5 + 3) % 12;
  NodeFeatureMatrix px(12, 5);
  for (std::size_t i = 0; i < 12; ++i) {
    for (std::size_t k = 0; k < 5; ++k) px(perm[i], k) = x(i, k);
  }
  const auto moved = predict(permuted(g, perm), px, p, c);
  for (std::size_t i = 0; i < 12; ++i) EXPECT_NEAR(moved.probs(perm[i], 1), base.probs(i, 1), 1e-9);
}

TEST(Forward, ShapeErrors) {
  Rng rng(5);
  const auto g = support::random_graph(4, 0.5, rng);
  BiGGNNParams p(3, 4, std::vector<std::size_t>{32, 16}, rng);
  nn::Tape tape;
  EXPECT_THROW(forward(tape, Adjacency::of(g), random_features(3, 3, rng), p, 1), ShapeError);
  EXPECT_THROW(forward(tape, Adjacency::of(g), random_features(4, 2, rng), p, 1), ShapeError);
}

TEST(Forward, EndToEndGradient) {
  Rng rng(6);
  const auto g = graph::normalize_edge_weights(support::random_graph(12, 0.3, rng));
  const auto x = random_features(12, 4, rng);
  BiGGNNParams p(4, 8, std::vector<std::size_t>{32, 16}, rng);
  const auto adj = Adjacency::of(g);
  std::vector<int> labels(12);
  for (std::size_t i = 0; i < 12; ++i) labels[i] = static_cast<int>(i % 3 == 0);
  const std::vector<std::size_t> rows{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11};
  auto params = p.parameters();
  const double err = nn::grad_check(
      [&](nn::Tape& t) { return nn::cross_entropy(forward(t, adj, x, p, 2).probs, labels, rows); }, params, 1e-5);
  EXPECT_LT(err, 1e-4);
}

TEST(Train, OverfitsTwentyNodes) {
  Rng rng(7);
  const auto d = planted(20, rng);
  const auto masks = split_masks(20, 0, 0);
  ModelConfig c;
  c.hidden_size = 16;
  c.graph_hops = 2;
  c.max_epochs = 300;
  c.use_smote = false;
  Rng train_rng(1);
  auto result = train(d.g, d.x, d.labels, masks, c, train_rng);
  const auto pred = predict(d.g, d.x, result.params, c);
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(pred.probs(i, 1) >= 0.5, d.labels[i] == 1) << "node " << i;
  EXPECT_EQ(result.history.val_metric_name, "neg_loss");
}

TEST(Train, DeterministicAndSelection) {
  Rng rng(8);
  const auto d = planted(40, rng);
  const auto masks = split_masks(40, 4, 4);
  ModelConfig c;
  c.hidden_size = 16;
  c.max_epochs = 8;
  Rng a(3), b(3);
  const auto r1 = train(d.g, d.x, d.labels, masks, c, a);
  const auto r2 = train(d.g, d.x, d.labels, masks, c, b);
  EXPECT_EQ(r1.history.train_loss, r2.history.train_loss);
  EXPECT_EQ(r1.history.val_metric, r2.history.val_metric);
  EXPECT_EQ(r1.history.val_metric_name, "auc");
  const auto& v = r1.history.val_metric;
  const auto best = std::max_element(v.begin(), v.end()) - v.begin();
  EXPECT_EQ(r1.history.selected_epoch, static_cast<std::size_t>(best) + 1);

  c.max_epochs = 1;
  Rng e(3);
  EXPECT_EQ(train(d.g, d.x, d.labels, masks, c, e).history.selected_epoch, 1u);
}

TEST(Train, Errors) {
  Rng rng(9);
  auto d = planted(20, rng);
  const auto masks = split_masks(20, 4, 4);
  ModelConfig c;
  c.max_epochs = 2;
  std::vector<int> single(20, 0);
  Rng a(1);
  EXPECT_THROW(train(d.g, d.x, single, masks, c, a), TrainingError);
  sampling::NodeMasks none{std::vector<bool>(20, false), std::vector<bool>(20, false), std::vector<bool>(20, true)};
  EXPECT_THROW(train(d.g, d.x, d.labels, none, c, a), TrainingError);
  d.x(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_ANY_THROW(train(d.g, d.x, d.labels, masks, c, a));
}

TEST(Config, ValidateAndGrid) {
  ModelConfig c;
  EXPECT_NO_THROW(c.validate());
  SearchSpace space;
  EXPECT_TRUE(space.contains(c));
  c.hidden_size = 20;
  EXPECT_THROW(space.require(c), ConfigError);
  c = {};
  c.max_epochs = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.graph_hops = 0;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Search, SampledValuesInGrid) {
  SearchSpace space;
  Rng rng(10);
  for (int i = 0; i < 100; ++i) EXPECT_TRUE(space.contains(sample_config(space, ModelConfig{}, rng)));
}

TEST(Search, BudgetOneAndTies) {
  SearchSpace space;
  Rng a(11), b(11);
  const auto first = sample_config(space, ModelConfig{}, a);
  const auto one = random_search(space, ModelConfig{}, 1, [](const ModelConfig&) { return 0.0; }, b);
  EXPECT_EQ(one.best, first);
  Rng c(11);
  const auto tied = random_search(space, ModelConfig{}, 10, [](const ModelConfig&) { return 0.5; }, c);
  EXPECT_EQ(tied.best, first);
  EXPECT_EQ(tied.trials.size(), 10u);
  Rng d(1);
  EXPECT_THROW(random_search(space, ModelConfig{}, 0, [](const ModelConfig&) { return 0.0; }, d), ConfigError);
}

TEST(Search, IndicatorScoreFindsValue) {
  SearchSpace space;
  auto score = [](const ModelConfig& m) { return m.hidden_size == 64 ? 1.0 : 0.0; };
  Rng replay(12);
  bool sampled = false;
  for (int i = 0; i < 50; ++i) sampled |= sample_config(space, ModelConfig{}, replay).hidden_size == 64;
  Rng rng(12);
  const auto r = random_search(space, ModelConfig{}, 50, score, rng);
  ASSERT_TRUE(sampled);
  EXPECT_EQ(r.best.hidden_size, 64u);
}
