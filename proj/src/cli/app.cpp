#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mvdp/analysis.hpp"
#include "mvdp/cli.hpp"
#include "mvdp/config.hpp"
#include "mvdp/csv.hpp"
#include "mvdp/error.hpp"
#include "mvdp/eval/protocol.hpp"
#include "mvdp/graph.hpp"
#include "mvdp/ingest.hpp"
#include "mvdp/rng.hpp"

namespace mvdp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string out_dir;
  std::size_t jobs = 1;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* jobs_opt = nullptr;
};

fs::path output_dir(const Globals& g, const fs::path& fallback) {
  fs::path dir = g.out_opt->count() ? fs::path(g.out_dir) : fallback;
  if (dir.empty()) dir = ".";
  fs::create_directories(dir);
  return dir;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

std::string run_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "run_%04zu.csv", i);
  return buf;
}

// ----- build-graph -----

struct BuildGraphArgs {
  std::string dataset;
  std::string view = "msdg";
  bool raw = false;
  bool sum_normalized = false;
};

int cmd_build_graph(const BuildGraphArgs& a, const Globals& g, std::ostream& out) {
  const ingest::VersionDataset ds = ingest::load_dataset(a.dataset);
  std::vector<graph::View> views;
  if (lower(a.view) == "all") {
    views = {graph::View::CDG, graph::View::DDG, graph::View::MSDG};
  } else {
    views = {graph::parse_view(a.view)};
  }
  const fs::path dir = output_dir(g, ".");
  graph::BuildOptions options;
  options.normalize = !a.raw;
  options.sum_normalized_views = a.sum_normalized;
  out << ds.name() << ": " << ds.size() << " files, defect rate " << std::setprecision(4) << ds.defect_rate()
      << '\n';
  for (graph::View v : views) {
    const graph::DependencyGraph graph = graph::build_view(ds, v, options);
    const std::string stem = lower(graph::to_string(v));
    graph::export_graph(graph, dir / (stem + ".edges.csv"), dir / (stem + ".graph.json"));
    out << graph::to_string(v) << ": " << graph.node_count() << " nodes, " << graph.edge_count() << " edges -> "
        << (dir / (stem + ".graph.json")).string() << '\n';
  }
  return kExitOk;
}

// ----- experiment -----

RunConfig resolved_config(const std::string& path, const Globals& g) {
  RunConfig c = load_run_config(path);
  if (g.seed_opt->count()) {
    c.seed = g.seed;
    c.model.seed = g.seed;
  }
  if (g.out_opt->count()) c.out_dir = g.out_dir;
  if (g.jobs_opt->count()) c.jobs = g.jobs;
  c.validate();
  c.require_paths();
  return c;
}

int cmd_experiment(const std::string& config_path, const Globals& g, std::ostream& out, std::ostream& err) {
  const RunConfig c = resolved_config(config_path, g);
  const eval::ExperimentOptions options = experiment_options(c);
  eval::ExperimentReport report;
  if (c.protocol == eval::Protocol::wpdp) {
    report = eval::run_wpdp(ingest::load_dataset(c.dataset), c.model, options);
  } else {
    std::vector<ingest::VersionDataset> sources;
    for (const auto& s : c.sources) sources.push_back(ingest::load_dataset(s));
    report = eval::run_cpdp_campaign(sources, ingest::load_dataset(c.target), c.model, options);
  }
  fs::create_directories(c.out_dir);
  eval::write_report(c.out_dir / "report.json", report);
  eval::write_summary_csv(c.out_dir / "summary.csv", report);
  if (c.dump_predictions) {
    fs::create_directories(c.out_dir / "predictions");
    fs::create_directories(c.out_dir / "features");
    for (const auto& run : report.runs) {
      eval::write_predictions_csv(c.out_dir / "predictions" / run_name(run.index), run.predictions);
      eval::write_features_csv(c.out_dir / "features" / run_name(run.index), run);
    }
  }
  for (const auto& w : report.warnings) err << "warning: " << w << '\n';
  out << eval::to_string(report.protocol) << " " << graph::to_string(report.view) << ": " << report.runs.size()
      << " runs, median auc " << report.medians.auc << " recall " << report.medians.recall << " brier "
      << report.medians.brier << " pf " << report.medians.pf << " f1 " << report.medians.f1 << '\n';
  out << "wrote " << (c.out_dir / "report.json").string() << '\n';
  if (report.partial) {
    err << "error: experiment incomplete: " << report.error << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

// ----- tune -----

int cmd_tune(const std::string& config_path, long long budget, std::size_t tune_reps, const Globals& g,
             std::ostream& out) {
  if (budget < 1) throw UsageError("--budget must be at least 1");
  if (tune_reps < 1) throw UsageError("--reps must be at least 1");
  RunConfig c = resolved_config(config_path, g);
  const fs::path data_dir = c.protocol == eval::Protocol::wpdp ? c.dataset : c.sources.front();
  const ingest::VersionDataset ds = ingest::load_dataset(data_dir);
  eval::ExperimentOptions options = experiment_options(c);
  options.reps = tune_reps;
  Rng rng(Rng::derive(c.seed, 0x74756e65));
  const model::SearchSpace space;
  const auto result = model::random_search(
      space, c.model, static_cast<std::size_t>(budget),
      [&](const model::ModelConfig& m) { return eval::tuning_score(ds, m, options); }, rng);
  c.model = result.best;
  c.model.seed = c.seed;
  if (!c.dataset.empty()) c.dataset = fs::absolute(c.dataset);
  for (auto& s : c.sources) s = fs::absolute(s);
  if (!c.target.empty()) c.target = fs::absolute(c.target);
  c.out_dir = fs::absolute(c.out_dir);
  fs::create_directories(c.out_dir);
  {
    std::ofstream f(c.out_dir / "best.cfg");
    if (!f) throw IoError("cannot write " + (c.out_dir / "best.cfg").string());
    f << format_run_config(c);
  }
  json trials = json::array();
  for (const auto& t : result.trials) {
    trials.push_back({{"config", eval::model_config_to_json(t.config)}, {"score", t.score}});
  }
  write_json(c.out_dir / "tune.json", {{"seed", c.seed},
                                       {"budget", budget},
                                       {"reps", tune_reps},
                                       {"best", eval::model_config_to_json(result.best)},
                                       {"best_score", result.best_score},
                                       {"trials", std::move(trials)}});
  out << "best score " << result.best_score << " after " << budget << " trials; wrote "
      << (c.out_dir / "best.cfg").string() << '\n';
  return kExitOk;
}

// ----- analyze -----

struct AnalyzeArgs {
  std::vector<std::string> graphs;
  std::string labels;
  std::vector<std::string> features;
  bool already_normalized = false;
  std::string version;
};

std::unordered_map<std::string, int> read_labels(const fs::path& path) {
  const csv::Table t = csv::read(path);
  const int fc = t.column("file");
  const int lc = t.column("label");
  if (fc < 0 || lc < 0) throw SchemaError(path.string() + ": needs `file` and `label` columns");
  std::unordered_map<std::string, int> out;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const long long y = csv::parse_int(t.rows[r][static_cast<std::size_t>(lc)],
                                       path.string() + " row " + std::to_string(r + 1) + " label");
    if (y != 0 && y != 1) throw ValidationError(path.string() + " row " + std::to_string(r + 1) + ": label must be 0 or 1");
    out[t.rows[r][static_cast<std::size_t>(fc)]] = static_cast<int>(y);
  }
  return out;
}

void read_feature_dump(const fs::path& path, NodeFeatureMatrix& x, std::vector<int>& labels) {
  const csv::Table t = csv::read(path);
  const int lc = t.column("label");
  if (lc < 0) throw SchemaError(path.string() + ": missing column 'label'");
  std::vector<std::size_t> cols;
  for (std::size_t k = 0; k < t.header.size(); ++k) {
    if (t.header[k] != "file" && t.header[k] != "label") cols.push_back(k);
  }
  x = NodeFeatureMatrix(t.rows.size(), cols.size());
  labels.clear();
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::string where = path.string() + " row " + std::to_string(r + 1);
    labels.push_back(static_cast<int>(csv::parse_int(t.rows[r][static_cast<std::size_t>(lc)], where)));
    for (std::size_t k = 0; k < cols.size(); ++k) x(r, k) = csv::parse_double(t.rows[r][cols[k]], where);
  }
}

int cmd_analyze(const AnalyzeArgs& a, const Globals& g, std::ostream& out) {
  if (a.graphs.empty() && a.features.empty()) throw UsageError("analyze needs --graph or --features inputs");
  if (!a.graphs.empty() && a.labels.empty()) throw UsageError("--graph needs --labels (a CSV with file,label)");
  const fs::path dir = output_dir(g, ".");
  const std::string version = a.version.empty() ? "dataset" : a.version;
  json doc = json::object();

  if (!a.graphs.empty()) {
    const auto labels_by_file = read_labels(a.labels);
    json shares = json::array();
    std::vector<std::string> columns;
    analysis::TableRow row{version, {}};
    for (const auto& path : a.graphs) {
      const graph::DependencyGraph graph = graph::import_graph(path);
      std::vector<int> labels;
      for (const auto& id : graph.node_ids()) {
        const auto it = labels_by_file.find(id);
        if (it == labels_by_file.end()) throw ValidationError("no label for file '" + id + "' in " + a.labels);
        labels.push_back(it->second);
      }
      const auto report = analysis::same_label_weight_share(graph, labels);
      json entry = analysis::to_json(report, graph.node_ids());
      entry["graph"] = path;
      entry["view"] = std::string(graph::to_string(graph.view()));
      shares.push_back(std::move(entry));
      columns.emplace_back(graph::to_string(graph.view()));
      row.values.push_back(report.total);
      out << graph::to_string(graph.view()) << " P_total " << report.total << '\n';
    }
    analysis::write_table_csv(dir / "neighbor_share.csv", columns, {row});
    doc["neighbor_share"] = std::move(shares);
  }

  if (!a.features.empty()) {
    json seps = json::array();
    std::vector<std::string> columns;
    analysis::TableRow row{version, {}};
    for (const auto& path : a.features) {
      NodeFeatureMatrix x;
      std::vector<int> labels;
      read_feature_dump(path, x, labels);
      const auto report = analysis::interclass_distance(x, labels, a.already_normalized);
      json entry = analysis::to_json(report);
      entry["features"] = path;
      seps.push_back(std::move(entry));
      columns.push_back(fs::path(path).stem().string());
      row.values.push_back(report.distance);
      out << fs::path(path).filename().string() << " distance " << report.distance << '\n';
    }
    analysis::write_table_csv(dir / "separability.csv", columns, {row});
    doc["separability"] = std::move(seps);
  }
  write_json(dir / "analysis.json", doc);
  return kExitOk;
}

// ----- compare -----

struct CompareArgs {
  std::string report_a;
  std::string report_b;
  std::vector<std::string> baseline;
  std::string dataset;
};

int cmd_compare(const CompareArgs& a, const Globals& g, std::ostream& out) {
  const eval::ExperimentReport ra = eval::read_report(a.report_a);
  eval::ExperimentReport rb;
  std::string b_name;
  if (!a.report_b.empty()) {
    if (!a.baseline.empty()) throw UsageError("give either a second report or --baseline files, not both");
    rb = eval::read_report(a.report_b);
    b_name = a.report_b;
  } else {
    if (a.baseline.empty()) throw UsageError("compare needs a second report or --baseline prediction files");
    if (a.dataset.empty()) throw UsageError("--baseline needs --dataset for the labels");
    std::vector<fs::path> files(a.baseline.begin(), a.baseline.end());
    rb = eval::baseline_report(files, ingest::load_dataset(a.dataset), ra.protocol);
    b_name = "baseline";
  }
  const auto tests = eval::compare_reports(ra, rb);
  const fs::path dir = output_dir(g, ".");
  write_json(dir / "compare.json", {{"a", a.report_a},
                                    {"b", b_name},
                                    {"runs", ra.runs.size()},
                                    {"bonferroni_m", eval::kMeasureCount},
                                    {"tests", eval::tests_to_json(tests)}});
  out << "measure  p        p_adj    delta    significant large\n";
  for (const auto& t : tests) {
    out << std::left << std::setw(8) << t.measure << ' ' << std::setw(8) << t.p_value << ' ' << std::setw(8)
        << t.p_value_bonferroni << ' ' << std::setw(8) << t.cliffs_delta << ' ' << std::setw(11)
        << (t.significant ? "yes" : "no") << ' ' << (t.large_effect ? "yes" : "no") << '\n';
  }
  return kExitOk;
}

// ----- synth -----

int cmd_synth(const ingest::SyntheticConfig& sc, const Globals& g, std::ostream& out) {
  if (!g.out_opt->count()) throw UsageError("synth needs --out-dir");
  const ingest::VersionDataset ds = ingest::generate_synthetic(sc, g.seed);
  const fs::path dir = output_dir(g, ".");
  ingest::save_dataset(ds, dir);
  out << "wrote " << ds.name() << " (" << ds.size() << " files, " << ds.dep_edges.size()
      << " dependency rows, defect rate " << ds.defect_rate() << ") to " << dir.string() << '\n';
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-view dependency graph defect prediction"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  g.seed_opt = app.add_option("--seed", g.seed, "Seed for every random choice");
  g.out_opt = app.add_option("--out-dir", g.out_dir, "Output directory");
  g.jobs_opt = app.add_option("--jobs", g.jobs, "Parallel repetitions")->check(CLI::PositiveNumber);

  BuildGraphArgs bg;
  auto* build = app.add_subcommand("build-graph", "Build and export dependency graph views");
  build->add_option("--dataset", bg.dataset, "Dataset directory")->required();
  build->add_option("--view", bg.view, "cdg, ddg, msdg or all");
  build->add_flag("--raw", bg.raw, "Keep raw weights (no outgoing-edge normalization)");
  build->add_flag("--sum-normalized-views", bg.sum_normalized, "Build the MSDG from normalized views");

  std::string config_path;
  auto* experiment = app.add_subcommand("experiment", "Run a WPDP or CPDP campaign from a config file");
  experiment->add_option("config", config_path, "Run config file")->required();

  long long budget = 0;
  std::size_t tune_reps = 3;
  auto* tune = app.add_subcommand("tune", "Random hyperparameter search");
  tune->add_option("config", config_path, "Run config file")->required();
  tune->add_option("--budget", budget, "Number of sampled configurations")->required();
  tune->add_option("--reps", tune_reps, "Repetitions per configuration");

  AnalyzeArgs an;
  auto* analyze = app.add_subcommand("analyze", "Same-label weight share and inter-class distance");
  analyze->add_option("--graph", an.graphs, "Graph sidecar JSON (repeatable)");
  analyze->add_option("--labels", an.labels, "CSV with file,label columns");
  analyze->add_option("--features", an.features, "Feature dump CSV file,label,... (repeatable)");
  analyze->add_flag("--already-normalized", an.already_normalized, "Skip row-wise min-max scaling");
  analyze->add_option("--version-name", an.version, "Row label for the CSV tables");

  CompareArgs cmp;
  auto* compare = app.add_subcommand("compare", "Paired statistical comparison of two reports");
  compare->add_option("report_a", cmp.report_a, "Report JSON")->required();
  compare->add_option("report_b", cmp.report_b, "Report JSON");
  compare->add_option("--baseline", cmp.baseline, "Baseline prediction CSVs, one per repetition");
  compare->add_option("--dataset", cmp.dataset, "Dataset directory supplying labels for --baseline");

  ingest::SyntheticConfig sc;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth->add_option("--n-nodes", sc.n_nodes);
  synth->add_option("--defect-rate", sc.defect_rate);
  synth->add_option("--homophily", sc.homophily);
  synth->add_option("--n-developers", sc.n_developers);
  synth->add_option("--mean-degree", sc.mean_degree);
  synth->add_option("--n-metrics", sc.n_metrics);
  synth->add_option("--feature-shift", sc.feature_shift);
  synth->add_option("--devs-per-file", sc.devs_per_file);
  synth->add_option("--view-coverage", sc.view_coverage);
  synth->add_option("--project", sc.project);
  synth->add_option("--version", sc.version);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*build) return cmd_build_graph(bg, g, out);
    if (*experiment) return cmd_experiment(config_path, g, out, err);
    if (*tune) return cmd_tune(config_path, budget, tune_reps, g, out);
    if (*analyze) return cmd_analyze(an, g, out);
    if (*compare) return cmd_compare(cmp, g, out);
    if (*synth) return cmd_synth(sc, g, out);
  } catch (const Error& e) {
    err << e.category() << ": " << e.what() << '\n';
    return e.is_validation() ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace mvdp::cli
