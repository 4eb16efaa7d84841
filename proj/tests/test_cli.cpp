#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mvdp/cli.hpp"
#include "mvdp/eval/protocol.hpp"
#include "mvdp/graph.hpp"
#include "support.hpp"

using namespace mvdp;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "mvdp");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

fs::path synth_dataset(const fs::path& dir, std::uint64_t seed, std::size_t n = 60) {
  const auto r = run({"synth", "--out-dir", dir.string(), "--seed", std::to_string(seed), "--n-nodes",
                      std::to_string(n), "--defect-rate", "0.3", "--feature-shift", "1"});
  EXPECT_EQ(r.code, 0) << r.err;
  return dir;
}

nlohmann::json report_sans_timestamp(const fs::path& p) {
  auto j = nlohmann::json::parse(slurp(p));
  j.erase("created_at");
  return j;
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"bogus"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"build-graph"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"--help"}).code, cli::kExitOk);
}

TEST(Cli, BuildGraphFiveModules) {
  const auto dir = support::scratch_dir("cli_five");
  ingest::save_dataset(support::five_module_dataset(), dir / "ds");
  auto r = run({"build-graph", "--dataset", (dir / "ds").string(), "--view", "msdg", "--raw", "--out-dir",
                (dir / "g").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("5 files"), std::string::npos);
  const auto g = graph::import_graph(dir / "g" / "msdg.graph.json");
  EXPECT_EQ(g.weight("C", "A"), 8.0);
  EXPECT_NE(slurp(dir / "g" / "msdg.edges.csv").find("C,A,8"), std::string::npos);

  r = run({"build-graph", "--dataset", (dir / "ds").string(), "--view", "all", "--out-dir", (dir / "all").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* v : {"cdg", "ddg", "msdg"}) {
    EXPECT_TRUE(fs::exists(dir / "all" / (std::string(v) + ".graph.json")));
    EXPECT_TRUE(fs::exists(dir / "all" / (std::string(v) + ".edges.csv")));
  }

  fs::remove(dir / "ds" / "deps.csv");
  r = run({"build-graph", "--dataset", (dir / "ds").string(), "--out-dir", (dir / "g").string()});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find((dir / "ds" / "deps.csv").string()), std::string::npos);
}

TEST(Cli, ExperimentWritesReproducibleReports) {
  const auto dir = support::scratch_dir("cli_exp");
  synth_dataset(dir / "ds", 3);
  write(dir / "run.cfg",
        "protocol = wpdp\ndataset = ds\nhidden_size = 16\nmax_epochs = 2\nreps = 2\nseed = 4\n"
        "out_dir = out\ndump_predictions = true\n");
  auto r = run({"experiment", (dir / "run.cfg").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto first = report_sans_timestamp(dir / "out" / "report.json");
  EXPECT_EQ(first["runs"].size(), 2u);
  EXPECT_TRUE(first.contains("medians"));
  EXPECT_EQ(first["seed"], 4);
  EXPECT_TRUE(fs::exists(dir / "out" / "summary.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "predictions" / "run_0001.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "features" / "run_0000.csv"));

  r = run({"experiment", (dir / "run.cfg").string(), "--out-dir", (dir / "again").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(report_sans_timestamp(dir / "again" / "report.json"), first);

  r = run({"experiment", (dir / "run.cfg").string(), "--seed", "5", "--out-dir", (dir / "other").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(report_sans_timestamp(dir / "other" / "report.json")["seed"], 5);
}

TEST(Cli, ExperimentConfigErrors) {
  const auto dir = support::scratch_dir("cli_exp_err");
  write(dir / "bad.cfg", "protocol = wpdp\ndataset = missing\n");
  EXPECT_EQ(run({"experiment", (dir / "bad.cfg").string()}).code, cli::kExitUsage);
  write(dir / "grid.cfg", "protocol = wpdp\ndataset = .\nhidden_size = 17\n");
  EXPECT_EQ(run({"experiment", (dir / "grid.cfg").string()}).code, cli::kExitUsage);
  EXPECT_EQ(run({"experiment", (dir / "none.cfg").string()}).code, cli::kExitUsage);
}

TEST(Cli, TuneBudget) {
  const auto dir = support::scratch_dir("cli_tune");
  synth_dataset(dir / "ds", 6, 40);
  write(dir / "t.cfg", "protocol = wpdp\ndataset = ds\nmax_epochs = 1\nseed = 2\nout_dir = out\n");
  EXPECT_EQ(run({"tune", (dir / "t.cfg").string(), "--budget", "0"}).code, cli::kExitUsage);
  auto r = run({"tune", (dir / "t.cfg").string(), "--budget", "2", "--reps", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto trials = nlohmann::json::parse(slurp(dir / "out" / "tune.json"));
  EXPECT_EQ(trials["trials"].size(), 2u);
  ASSERT_TRUE(fs::exists(dir / "out" / "best.cfg"));
  r = run({"tune", (dir / "t.cfg").string(), "--budget", "2", "--reps", "1", "--out-dir", (dir / "b").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(slurp(dir / "b" / "tune.json"))["trials"], trials["trials"]);
  EXPECT_NE(slurp(dir / "out" / "best.cfg").find("hidden_size"), std::string::npos);
}

TEST(Cli, AnalyzeShareAndSeparability) {
  const auto dir = support::scratch_dir("cli_analyze");
  synth_dataset(dir / "ds", 7);
  ASSERT_EQ(run({"build-graph", "--dataset", (dir / "ds").string(), "--view", "all", "--out-dir",
                 (dir / "g").string()})
                .code,
            0);
  auto r = run({"analyze", "--graph", (dir / "g" / "cdg.graph.json").string(), (dir / "g" / "ddg.graph.json").string(),
                (dir / "g" / "msdg.graph.json").string(), "--labels", (dir / "ds" / "metrics.csv").string(),
                "--version-name", "synthetic-1.0", "--out-dir", (dir / "a").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream table(dir / "a" / "neighbor_share.csv");
  std::string header, row, extra;
  std::getline(table, header);
  std::getline(table, row);
  EXPECT_EQ(header, "version,CDG,DDG,MSDG");
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 3);
  EXPECT_FALSE(std::getline(table, extra));

  // Hand fixture: v -> u1 (2, same label), v -> u2 (3, other label).
  const graph::DependencyGraph hand(graph::View::CDG, {"v", "u1", "u2"}, {{{0, 1}, 2.0}, {{0, 2}, 3.0}});
  graph::export_graph(hand, dir / "hand.edges.csv", dir / "hand.graph.json");
  write(dir / "hand_labels.csv", "file,label\nv,1\nu1,1\nu2,0\n");
  r = run({"analyze", "--graph", (dir / "hand.graph.json").string(), "--labels", (dir / "hand_labels.csv").string(),
           "--out-dir", (dir / "h").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(dir / "h" / "analysis.json"));
  EXPECT_DOUBLE_EQ(j["neighbor_share"][0]["nodes"][0]["p"].get<double>(), 0.4);

  write(dir / "one_class.csv", "file,label,h0,h1\na,1,0.1,0.2\nb,1,0.3,0.4\n");
  r = run({"analyze", "--features", (dir / "one_class.csv").string(), "--out-dir", (dir / "s").string()});
  EXPECT_EQ(r.code, cli::kExitRuntime);
  EXPECT_NE(r.err.find("analysis error"), std::string::npos);

  write(dir / "two_class.csv", "file,label,h0,h1\na,1,1,0\nb,0,0,0\n");
  r = run({"analyze", "--features", (dir / "two_class.csv").string(), "--already-normalized", "--out-dir",
           (dir / "s").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(slurp(dir / "s" / "separability.csv").find("dataset,1"), std::string::npos);

  EXPECT_EQ(run({"analyze"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"analyze", "--graph", (dir / "hand.graph.json").string()}).code, cli::kExitUsage);
}

TEST(Cli, CompareReports) {
  const auto dir = support::scratch_dir("cli_compare");
  synth_dataset(dir / "ds", 8);
  write(dir / "a.cfg", "protocol = wpdp\ndataset = ds\nmax_epochs = 1\nreps = 3\nseed = 1\nout_dir = a\n");
  write(dir / "b.cfg", "protocol = wpdp\ndataset = ds\nmax_epochs = 1\nreps = 2\nseed = 1\nout_dir = b\n");
  ASSERT_EQ(run({"experiment", (dir / "a.cfg").string()}).code, 0);
  ASSERT_EQ(run({"experiment", (dir / "b.cfg").string()}).code, 0);
  const auto a = (dir / "a" / "report.json").string();
  auto r = run({"compare", a, a, "--out-dir", (dir / "c").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(slurp(dir / "c" / "compare.json"));
  EXPECT_EQ(j["bonferroni_m"], 5);
  ASSERT_EQ(j["tests"].size(), 5u);
  for (const auto& t : j["tests"]) {
    EXPECT_EQ(t["p_value"], 1.0);
    EXPECT_EQ(t["cliffs_delta"], 0.0);
  }
  EXPECT_EQ(run({"compare", a, (dir / "b" / "report.json").string(), "--out-dir", (dir / "c").string()}).code,
            cli::kExitUsage);
  EXPECT_EQ(run({"compare", a}).code, cli::kExitUsage);

  const auto ds = ingest::load_dataset(dir / "ds");
  std::vector<std::string> args{"compare", a, "--dataset", (dir / "ds").string(), "--out-dir", (dir / "d").string(),
                                "--baseline"};
  for (int rep = 0; rep < 3; ++rep) {
    const auto p = dir / ("base" + std::to_string(rep) + ".csv");
    std::ofstream out(p);
    out << "file,prob_defective\n";
    for (const auto& rec : ds.records) out << rec.file_id << ",0.5\n";
    args.push_back(p.string());
  }
  r = run(args);
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST(Cli, SynthDeterministic) {
  const auto dir = support::scratch_dir("cli_synth");
  EXPECT_EQ(run({"synth", "--seed", "3"}).code, cli::kExitUsage);
  synth_dataset(dir / "a", 3);
  synth_dataset(dir / "b", 3);
  EXPECT_EQ(ingest::load_dataset(dir / "a").records, ingest::load_dataset(dir / "b").records);
  EXPECT_EQ(slurp(dir / "a" / "deps.csv"), slurp(dir / "b" / "deps.csv"));
  EXPECT_EQ(run({"synth", "--out-dir", (dir / "c").string(), "--defect-rate", "2"}).code, cli::kExitUsage);
}
