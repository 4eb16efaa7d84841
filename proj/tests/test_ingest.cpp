#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "mvdp/error.hpp"
#include "mvdp/ingest.hpp"
#include "support.hpp"

using namespace mvdp;
using namespace mvdp::ingest;

namespace {

MetricManifest two_metrics() {
  MetricManifest m;
  m.names = {"loc", "churn"};
  m.categories = {MetricCategory::code, MetricCategory::process};
  return m;
}

}  // namespace

TEST(ParseMetrics, LargeExportKeepsRowsAndLabels) {
  std::ostringstream text;
  text << "file,label,loc,churn\n";
  for (int i = 0; i < 798; ++i) {
    text << "org/example/F" << i << ".java," << (i < 199 ? 1 : 0) << ',' << i * 3 << ',' << i % 17 << '\n';
  }
  const auto records = parse_metrics_text(text.str(), two_metrics());
  ASSERT_EQ(records.size(), 798u);
  int defective = 0;
  for (const auto& r : records) defective += r.label;
  EXPECT_EQ(defective, 199);
  EXPECT_EQ(records[5].file_id, "org/example/F5.java");
  EXPECT_DOUBLE_EQ(records[5].metrics[0], 15.0);
}

TEST(ParseMetrics, HeaderOnlyIsEmpty) {
  EXPECT_TRUE(parse_metrics_text("file,label,loc,churn\n", two_metrics()).empty());
}

TEST(ParseMetrics, DefectRateFromLabels) {
  VersionDataset ds;
  ds.manifest = two_metrics();
  ds.records = parse_metrics_text("file,label,loc,churn\nA,1,1,2\nB,0,3,4\nC,1,5,6\n", two_metrics());
  EXPECT_DOUBLE_EQ(ds.defect_rate(), 2.0 / 3.0);
}

TEST(ParseMetrics, Errors) {
  try {
    parse_metrics_text("file,label,loc\nA,1,1\n", two_metrics());
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_NE(std::string(e.what()).find("churn"), std::string::npos);
  }
  try {
    parse_metrics_text("file,label,loc,churn\nA,1,1,2\nB,0,x,4\n", two_metrics());
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find('2'), std::string::npos);
  }
  EXPECT_THROW(parse_metrics_text("file,label,loc,churn\nA,1,1,2\nA,0,3,4\n", two_metrics()), ValidationError);
}

TEST(ParseDependencies, RowsAndErrors) {
  const auto edges = parse_dependencies_text("src,dst,kind,count\nC,A,call,3\n");
  ASSERT_EQ(edges.size(), 1u);
  EXPECT_EQ(edges[0], (RawDependencyEdge{"C", "A", DependencyKind::call, 3}));
  try {
    parse_dependencies_text("src,dst,kind,count\nC,A,ctrl,3\n");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("ctrl"), std::string::npos);
  }
  EXPECT_THROW(parse_dependencies_text("src,dst,kind,count\nC,A,call,0\n"), ValidationError);
  EXPECT_EQ(parse_dependencies_text("src,dst,kind,count\nA,B,data,2\nA,B,data,5\n").size(), 2u);
}

TEST(ParseOwnership, DeduplicatesPairs) {
  const auto recs = parse_ownership_text("file,developer\nA,d1\nA,d1\nA,d2\n");
  EXPECT_EQ(recs.size(), 2u);
  EXPECT_TRUE(parse_ownership_text("file,developer\n").empty());
  EXPECT_THROW(parse_ownership_text("file,developer\nA,\n"), ValidationError);
}

TEST(NormalizeMetrics, MinMaxPerColumn) {
  VersionDataset ds;
  ds.manifest = two_metrics();
  ds.records = {{"A", {2, 5}, 0}, {"B", {4, 5}, 1}, {"C", {6, 5}, 0}};
  const auto out = normalize_metrics(ds);
  EXPECT_DOUBLE_EQ(out.records[0].metrics[0], 0.0);
  EXPECT_DOUBLE_EQ(out.records[1].metrics[0], 0.5);
  EXPECT_DOUBLE_EQ(out.records[2].metrics[0], 1.0);
  for (const auto& r : out.records) EXPECT_DOUBLE_EQ(r.metrics[1], 0.0);
  EXPECT_EQ(out.labels(), ds.labels());
  EXPECT_EQ(out.file_ids(), ds.file_ids());

  VersionDataset unit;
  unit.manifest = two_metrics();
  unit.records = {{"A", {0, 1}, 0}, {"B", {1, 0.25}, 1}, {"C", {0.5, 0}, 0}};
  EXPECT_EQ(normalize_metrics(unit).records, unit.records);
}

TEST(NormalizeMetrics, RangeAndArgExtremaPreserved) {
  const auto ds = generate_synthetic({}, 11);
  const auto out = normalize_metrics(ds);
  const auto before = ds.features();
  const auto after = out.features();
  for (std::size_t c = 0; c < before.cols(); ++c) {
    std::size_t lo = 0, hi = 0, lo2 = 0, hi2 = 0;
    for (std::size_t r = 0; r < before.rows(); ++r) {
      ASSERT_GE(after(r, c), 0.0);
      ASSERT_LE(after(r, c), 1.0);
      if (before(r, c) < before(lo, c)) lo = r;
      if (before(r, c) > before(hi, c)) hi = r;
      if (after(r, c) < after(lo2, c)) lo2 = r;
      if (after(r, c) > after(hi2, c)) hi2 = r;
    }
    EXPECT_EQ(lo, lo2);
    EXPECT_EQ(hi, hi2);
  }
}

TEST(Dataset, SaveLoadRoundTrip) {
  const auto ds = generate_synthetic({}, 5);
  const auto dir = support::scratch_dir("roundtrip");
  save_dataset(ds, dir);
  EXPECT_EQ(load_dataset(dir), ds);
}

TEST(Dataset, MissingFileNamesPath) {
  const auto dir = support::scratch_dir("missing");
  save_dataset(generate_synthetic({}, 5), dir);
  std::filesystem::remove(dir / "deps.csv");
  try {
    load_dataset(dir);
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("deps.csv"), std::string::npos);
  }
}

TEST(Dataset, UnresolvedEdgeEndpointRejected) {
  auto ds = support::five_module_dataset();
  ds.dep_edges.push_back({"A", "Z", DependencyKind::call, 1});
  EXPECT_THROW(ds.validate(), ValidationError);
}

TEST(Synthetic, Deterministic) {
  SyntheticConfig c;
  EXPECT_EQ(generate_synthetic(c, 9), generate_synthetic(c, 9));
  EXPECT_NE(generate_synthetic(c, 9), generate_synthetic(c, 10));
}

TEST(Synthetic, FullHomophilyEdgesJoinSameLabel) {
  SyntheticConfig c;
  c.n_nodes = 100;
  c.homophily = 1.0;
  const auto ds = generate_synthetic(c, 3);
  const auto idx = ds.index();
  ASSERT_FALSE(ds.dep_edges.empty());
  for (const auto& e : ds.dep_edges) {
    EXPECT_EQ(ds.records[idx.at(e.src)].label, ds.records[idx.at(e.dst)].label);
  }
}

TEST(Synthetic, MeasuredHomophilyNearTarget) {
  SyntheticConfig c;
  c.n_nodes = 500;
  c.homophily = 0.9;
  const auto ds = generate_synthetic(c, 4);
  const auto idx = ds.index();
  std::size_t same = 0;
  for (const auto& e : ds.dep_edges) same += ds.records[idx.at(e.src)].label == ds.records[idx.at(e.dst)].label;
  const double frac = static_cast<double>(same) / static_cast<double>(ds.dep_edges.size());
  EXPECT_GE(frac, 0.85);
  EXPECT_LE(frac, 0.95);
}

TEST(Synthetic, InfeasibleConfig) {
  SyntheticConfig c;
  c.n_nodes = 10;
  c.defect_rate = 0.05;
  EXPECT_THROW(generate_synthetic(c, 1), ConfigError);
  c.defect_rate = 0.5;
  c.view_coverage = 0.0;
  EXPECT_THROW(generate_synthetic(c, 1), ConfigError);
}

TEST(Synthetic, DefectRateAndCoverage) {
  SyntheticConfig c;
  c.view_coverage = 0.6;
  const auto ds = generate_synthetic(c, 8);
  EXPECT_NEAR(ds.defect_rate(), 0.15, 0.01);
  std::set<std::string> touched;
  for (const auto& e : ds.dep_edges) {
    touched.insert(e.src);
    touched.insert(e.dst);
  }
  EXPECT_LE(touched.size(), 180u);
}
