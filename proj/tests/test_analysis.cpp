#include <gtest/gtest.h>

#include <fstream>

#include "mvdp/analysis.hpp"
#include "mvdp/error.hpp"
#include "support.hpp"

using namespace mvdp;
using namespace mvdp::analysis;

TEST(Share, HandExamples) {
  std::vector<std::string> ids{"v", "u1", "u2", "iso"};
  const graph::DependencyGraph g(graph::View::CDG, ids, {{{0, 1}, 2.0}, {{0, 2}, 3.0}});
  const auto r = same_label_weight_share(g, {1, 1, 0, 1});
  EXPECT_DOUBLE_EQ(r.per_node[0], 0.4);
  EXPECT_EQ(r.per_node[3], 0.0);
  EXPECT_DOUBLE_EQ(r.total, 0.1);
  EXPECT_THROW(same_label_weight_share(g, {1, 0}), ValidationError);
}

TEST(Share, SingleLabelCountsNodesWithSuccessors) {
  Rng rng(1);
  const auto g = support::random_graph(15, 0.1, rng);
  const auto r = same_label_weight_share(g, std::vector<int>(15, 1));
  std::size_t with_out = 0;
  for (std::size_t v = 0; v < 15; ++v) with_out += !g.outgoing(v).empty();
  EXPECT_DOUBLE_EQ(r.total, static_cast<double>(with_out) / 15.0);
}

TEST(Share, OracleAndNormalizationInvariance) {
  Rng rng(2);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 1 + rng.index(20);
    const auto g = support::random_graph(n, rng.uniform(), rng);
    std::vector<int> labels(n);
    for (int& y : labels) y = rng.bernoulli(0.5);
    const auto r = same_label_weight_share(g, labels);
    ASSERT_NEAR(r.total, support::oracle::share_total(g, labels), 1e-9);
    ASSERT_NEAR(same_label_weight_share(graph::normalize_edge_weights(g), labels).total, r.total, 1e-9);
    for (double p : r.per_node) ASSERT_TRUE(p >= 0.0 && p <= 1.0);
  }
}

TEST(Separability, HandExamples) {
  EXPECT_DOUBLE_EQ(interclass_distance(NodeFeatureMatrix(2, 2, {1, 0, 0, 0}), {1, 0}, true).distance, 1.0);
  EXPECT_DOUBLE_EQ(interclass_distance(NodeFeatureMatrix(2, 2, {3, 4, 3, 4}), {1, 0}, false).distance, 0.0);
  const auto r = interclass_distance(NodeFeatureMatrix(3, 2, {0, 0, 1, 1, 1, 0}), {1, 1, 0}, true);
  EXPECT_DOUBLE_EQ(r.distance, 1.0);
  EXPECT_EQ(r.n_defective, 2u);
  EXPECT_EQ(r.n_clean, 1u);
  EXPECT_THROW(interclass_distance(NodeFeatureMatrix(2, 1, {1, 2}), {1, 1}, true), AnalysisError);
}

TEST(Separability, RowScalingAndSymmetry) {
  // Row (2, 4) scales to (0, 1); row (5, 1) to (1, 0).
  const auto r = interclass_distance(NodeFeatureMatrix(2, 2, {2, 4, 5, 1}), {1, 0}, false);
  EXPECT_DOUBLE_EQ(r.distance, std::sqrt(2.0));
  Rng rng(3);
  NodeFeatureMatrix x(10, 4);
  for (double& v : x.values()) v = rng.uniform();
  std::vector<int> y{1, 0, 1, 0, 0, 1, 0, 0, 1, 0};
  std::vector<int> flipped(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) flipped[i] = 1 - y[i];
  EXPECT_NEAR(interclass_distance(x, y, false).distance, interclass_distance(x, flipped, false).distance, 1e-12);
}

TEST(Table, CsvLayout) {
  const auto dir = support::scratch_dir("table");
  write_table_csv(dir / "t.csv", {"CDG", "DDG", "MSDG"}, {{"v1", {0.5, 0.25, 0.75}}});
  std::ifstream in(dir / "t.csv");
  std::string header, row;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_EQ(header, "version,CDG,DDG,MSDG");
  EXPECT_EQ(row, "v1,0.5,0.25,0.75");
}
