#include "mvdp/eval/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <thread>
#include <unordered_map>

#include "mvdp/csv.hpp"
#include "mvdp/error.hpp"

namespace mvdp::eval {

using nlohmann::json;

std::string_view to_string(Protocol p) { return p == Protocol::wpdp ? "wpdp" : "cpdp"; }

Protocol parse_protocol(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "wpdp") return Protocol::wpdp;
  if (lower == "cpdp") return Protocol::cpdp;
  throw ConfigError("unknown protocol '" + std::string(text) + "' (expected wpdp or cpdp)");
}

double measure(const MetricReport& r, std::string_view name) {
  if (name == "auc") return r.auc;
  if (name == "recall") return r.recall;
  if (name == "brier") return r.brier;
  if (name == "pf") return r.pf;
  if (name == "f1") return r.f1;
  throw ValidationError("unknown measure '" + std::string(name) + "'");
}

sampling::NodeMasks stratified_split(const std::vector<int>& labels, const SplitFractions& fractions, Rng& rng) {
  const std::size_t n = labels.size();
  sampling::NodeMasks masks{std::vector<bool>(n, false), std::vector<bool>(n, false), std::vector<bool>(n, false)};
  for (int cls : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (labels[i] == cls) members.push_back(i);
    }
    rng.shuffle(std::span<std::size_t>(members));
    const auto c = static_cast<long>(members.size());
    std::array<long, 3> count{std::lround(fractions.train * static_cast<double>(c)),
                              std::lround(fractions.val * static_cast<double>(c)), 0};
    count[1] = std::min(count[1], c - count[0]);
    count[2] = c - count[0] - count[1];
    if (fractions.test <= 0.0) {
      count[1] += count[2];
      count[2] = 0;
    }
    // Every split with a non-zero share gets at least one node when possible.
    const std::array<double, 3> share{fractions.train, fractions.val, fractions.test};
    for (std::size_t k = 0; k < 3; ++k) {
      if (share[k] <= 0.0 || count[k] > 0) continue;
      const auto donor = static_cast<std::size_t>(std::max_element(count.begin(), count.end()) - count.begin());
      if (count[donor] > 1) {
        --count[donor];
        ++count[k];
      }
    }
    std::size_t pos = 0;
    for (long i = 0; i < count[0]; ++i) masks.train[members[pos++]] = true;
    for (long i = 0; i < count[1]; ++i) masks.val[members[pos++]] = true;
    for (long i = 0; i < count[2]; ++i) masks.test[members[pos++]] = true;
  }
  return masks;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

Medians compute_medians(const std::vector<RunRecord>& runs) {
  auto collect = [&runs](std::string_view name) {
    std::vector<double> v;
    v.reserve(runs.size());
    for (const auto& r : runs) v.push_back(measure(r.metrics, name));
    return median(std::move(v));
  };
  return {collect("auc"), collect("recall"), collect("brier"), collect("pf"), collect("f1")};
}

namespace {

struct Outcome {
  std::optional<RunRecord> run;
  std::string error;
  std::vector<std::string> warnings;
};

template <typename Fn>
std::vector<Outcome> run_all(std::size_t count, std::size_t jobs, Fn task) {
  std::vector<Outcome> outcomes(count);
  auto guarded = [&](std::size_t i) {
    try {
      outcomes[i] = task(i);
    } catch (const Error& e) {
      outcomes[i].error = "run " + std::to_string(i) + ": " + e.what();
    }
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) guarded(i);
    return outcomes;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) guarded(i);
    });
  }
  for (auto& t : workers) t.join();
  return outcomes;
}

void collect(ExperimentReport& report, std::vector<Outcome>& outcomes) {
  for (auto& o : outcomes) {
    for (auto& w : o.warnings) report.warnings.push_back(std::move(w));
    if (o.run) {
      report.runs.push_back(std::move(*o.run));
    } else {
      if (!report.partial) report.error = o.error;
      report.partial = true;
      report.warnings.push_back(o.error);
    }
  }
  report.medians = compute_medians(report.runs);
}

bool both_classes(const std::vector<int>& labels, const std::vector<bool>& mask) {
  bool pos = false;
  bool neg = false;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (mask[i]) (labels[i] == 1 ? pos : neg) = true;
  }
  return pos && neg;
}

void require_class_counts(const ingest::VersionDataset& d, std::size_t minimum) {
  const auto labels = d.labels();
  const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  const std::size_t neg = labels.size() - pos;
  if (pos < minimum || neg < minimum) {
    throw ValidationError(d.name() + " needs at least " + std::to_string(minimum) + " files of each class (has " +
                          std::to_string(pos) + " defective, " + std::to_string(neg) + " clean)");
  }
}

constexpr std::size_t kMaxRedraws = 100;

ExperimentReport make_report(Protocol protocol, const model::ModelConfig& config, const ExperimentOptions& options) {
  ExperimentReport report;
  report.protocol = protocol;
  report.view = options.view;
  report.config = config;
  report.build = options.build;
  report.seed = options.seed;
  report.reps = options.reps;
  report.created_at = utc_timestamp();
  return report;
}

void check_options(const model::ModelConfig& config, const ExperimentOptions& options) {
  config.validate();
  if (options.reps < 1) throw ConfigError("reps must be at least 1");
}

struct Prepared {
  graph::DependencyGraph graph;
  NodeFeatureMatrix x;
  std::vector<int> labels;
  std::vector<std::string> ids;
};

Prepared prepare(const ingest::VersionDataset& dataset, const ExperimentOptions& options) {
  ingest::VersionDataset normalized = ingest::normalize_metrics(dataset);
  Prepared p;
  p.graph = graph::build_view(normalized, options.view, options.build);
  p.x = normalized.features();
  p.labels = normalized.labels();
  p.ids = normalized.file_ids();
  return p;
}

// Trains with `masks` and scores the resulting model on `rows` of `eval`.
Outcome train_and_score(const Prepared& train_on, const sampling::NodeMasks& masks, const Prepared& eval_on,
                        const std::vector<std::size_t>& rows, model::ModelConfig config, Rng& rng) {
  model::TrainResult result = model::train(train_on.graph, train_on.x, train_on.labels, masks, config, rng);
  const bool same = &train_on == &eval_on;
  const model::Prediction pred =
      same ? model::predict(result.data.graph, result.data.features, result.params, config)
           : model::predict(eval_on.graph, eval_on.x, result.params, config);
  Outcome out;
  RunRecord run;
  std::vector<double> scores;
  std::vector<int> y;
  run.hidden = pred.hidden.gather_rows(rows);
  for (std::size_t r : rows) {
    scores.push_back(pred.probs(r, 1));
    y.push_back(eval_on.labels[r]);
    run.predictions.push_back({eval_on.ids[r], pred.probs(r, 1), eval_on.labels[r]});
  }
  run.metrics = evaluate(scores, y);
  run.selected_epoch = result.history.selected_epoch;
  out.run = std::move(run);
  return out;
}

}  // namespace

ExperimentReport run_wpdp(const ingest::VersionDataset& dataset, const model::ModelConfig& config,
                          const ExperimentOptions& options) {
  check_options(config, options);
  dataset.validate();
  require_class_counts(dataset, 3);
  ExperimentReport report = make_report(Protocol::wpdp, config, options);
  report.sources = {dataset.name()};
  report.target = dataset.name();
  const Prepared data = prepare(dataset, options);

  auto outcomes = run_all(options.reps, options.jobs, [&](std::size_t i) {
    const std::uint64_t seed = Rng::derive(options.seed, i);
    Rng rng(seed);
    sampling::NodeMasks masks;
    std::size_t redraws = 0;
    for (;;) {
      masks = stratified_split(data.labels, kWpdpSplit, rng);
      if (both_classes(data.labels, masks.train) && both_classes(data.labels, masks.test)) break;
      if (++redraws > kMaxRedraws) throw TrainingError("no split with both classes in train and test");
    }
    model::ModelConfig cfg = config;
    cfg.seed = seed;
    Outcome out = train_and_score(data, masks, data, masks.test_indices(), cfg, rng);
    out.run->index = i;
    out.run->seed = seed;
    out.run->source = dataset.name();
    out.run->target = dataset.name();
    out.run->redraws = redraws;
    if (redraws > 0) {
      out.warnings.push_back("run " + std::to_string(i) + ": split redrawn " + std::to_string(redraws) +
                             " time(s) for a single-class train or test split");
    }
    return out;
  });
  collect(report, outcomes);
  return report;
}

double tuning_score(const ingest::VersionDataset& dataset, const model::ModelConfig& config,
                    const ExperimentOptions& options) {
  check_options(config, options);
  dataset.validate();
  require_class_counts(dataset, 3);
  const Prepared data = prepare(dataset, options);
  std::vector<double> scores(options.reps);
  auto outcomes = run_all(options.reps, options.jobs, [&](std::size_t i) {
    const std::uint64_t seed = Rng::derive(options.seed, i);
    Rng rng(seed);
    sampling::NodeMasks masks;
    for (std::size_t redraws = 0;; ++redraws) {
      masks = stratified_split(data.labels, kWpdpSplit, rng);
      if (both_classes(data.labels, masks.train)) break;
      if (redraws >= kMaxRedraws) throw TrainingError("no split with both classes in train");
    }
    model::ModelConfig cfg = config;
    cfg.seed = seed;
    const auto result = model::train(data.graph, data.x, data.labels, masks, cfg, rng);
    scores[i] = result.history.val_metric[result.history.selected_epoch - 1];
    return Outcome{RunRecord{}, {}, {}};
  });
  for (const auto& o : outcomes) {
    if (!o.run) throw TrainingError(o.error);
  }
  return median(std::move(scores));
}

namespace {

void require_same_manifest(const ingest::VersionDataset& source, const ingest::VersionDataset& target) {
  if (!(source.manifest == target.manifest)) {
    throw ValidationError("metric manifests of " + source.name() + " and " + target.name() + " differ");
  }
}

ExperimentReport cpdp_impl(const std::vector<const ingest::VersionDataset*>& sources,
                           const ingest::VersionDataset& target, const model::ModelConfig& config,
                           const ExperimentOptions& options) {
  check_options(config, options);
  target.validate();
  require_class_counts(target, 1);
  ExperimentReport report = make_report(Protocol::cpdp, config, options);
  report.target = target.name();
  std::vector<Prepared> prepared;
  for (const auto* s : sources) {
    s->validate();
    require_same_manifest(*s, target);
    require_class_counts(*s, 2);
    report.sources.push_back(s->name());
    if (s->name() == target.name()) {
      report.warnings.push_back("source " + s->name() +
                                " is the target: evaluation includes the nodes it was trained on");
    }
    prepared.push_back(prepare(*s, options));
  }
  const Prepared eval_on = prepare(target, options);
  std::vector<std::size_t> all_rows(eval_on.labels.size());
  for (std::size_t i = 0; i < all_rows.size(); ++i) all_rows[i] = i;

  const std::size_t reps = options.reps;
  auto outcomes = run_all(sources.size() * reps, options.jobs, [&](std::size_t i) {
    const std::size_t s = i / reps;
    const std::uint64_t seed = Rng::derive(Rng::derive(options.seed, s), i % reps);
    Rng rng(seed);
    const Prepared& src = prepared[s];
    sampling::NodeMasks masks;
    std::size_t redraws = 0;
    for (;;) {
      masks = stratified_split(src.labels, kCpdpSplit, rng);
      if (both_classes(src.labels, masks.train)) break;
      if (++redraws > kMaxRedraws) throw TrainingError("no split with both classes in train");
    }
    model::ModelConfig cfg = config;
    cfg.seed = seed;
    Outcome out = train_and_score(src, masks, eval_on, all_rows, cfg, rng);
    out.run->index = i;
    out.run->seed = seed;
    out.run->source = sources[s]->name();
    out.run->target = target.name();
    out.run->redraws = redraws;
    return out;
  });
  collect(report, outcomes);
  return report;
}

}  // namespace

ExperimentReport run_cpdp(const ingest::VersionDataset& source, const ingest::VersionDataset& target,
                          const model::ModelConfig& config, const ExperimentOptions& options) {
  return cpdp_impl({&source}, target, config, options);
}

ExperimentReport run_cpdp_campaign(const std::vector<ingest::VersionDataset>& sources,
                                   const ingest::VersionDataset& target, const model::ModelConfig& config,
                                   const ExperimentOptions& options) {
  if (sources.empty()) throw ConfigError("a CPDP campaign needs at least one source");
  std::vector<const ingest::VersionDataset*> ptrs;
  for (const auto& s : sources) ptrs.push_back(&s);
  return cpdp_impl(ptrs, target, config, options);
}

std::vector<StatTestResult> compare_reports(const ExperimentReport& a, const ExperimentReport& b) {
  if (a.runs.size() != b.runs.size()) {
    throw UsageError("reports have " + std::to_string(a.runs.size()) + " and " + std::to_string(b.runs.size()) +
                     " runs; comparison pairs runs by index");
  }
  if (a.runs.empty()) throw UsageError("reports contain no runs");
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    if (a.runs[i].index != b.runs[i].index) {
      throw UsageError("run " + std::to_string(i) + " has index " + std::to_string(a.runs[i].index) + " vs " +
                       std::to_string(b.runs[i].index));
    }
  }
  std::vector<StatTestResult> out;
  std::vector<double> raw;
  for (std::string_view name : kMeasures) {
    std::vector<double> xa, xb;
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
      xa.push_back(measure(a.runs[i].metrics, name));
      xb.push_back(measure(b.runs[i].metrics, name));
    }
    const WilcoxonResult w = wilcoxon_signed_rank(xa, xb);
    StatTestResult t;
    t.measure = std::string(name);
    t.p_value = w.p_value;
    t.cliffs_delta = cliffs_delta(xa, xb);
    t.large_effect = std::abs(t.cliffs_delta) >= kLargeEffect;
    t.degenerate = w.degenerate;
    raw.push_back(w.p_value);
    out.push_back(t);
  }
  const auto adjusted = bonferroni(raw, kMeasureCount);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].p_value_bonferroni = adjusted[k];
    out[k].significant = adjusted[k] < kSignificanceLevel;
  }
  return out;
}

std::vector<PredictionRow> read_baseline_predictions(const std::filesystem::path& path,
                                                     const ingest::VersionDataset& dataset) {
  const csv::Table table = csv::read(path);
  const int file_idx = table.column("file");
  const int prob_idx = table.column("prob_defective");
  if (file_idx < 0 || prob_idx < 0) {
    throw SchemaError(path.string() + ": missing column '" + (file_idx < 0 ? "file" : "prob_defective") + "'");
  }
  const auto file_col = static_cast<std::size_t>(file_idx);
  const auto prob_col = static_cast<std::size_t>(prob_idx);
  const auto index = dataset.index();
  std::vector<PredictionRow> rows;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto it = index.find(row[file_col]);
    if (it == index.end()) {
      throw ValidationError(path.string() + " row " + std::to_string(r + 1) + ": file '" + row[file_col] +
                            "' is not in " + dataset.name());
    }
    const double p = csv::parse_double(row[prob_col], path.string() + " row " + std::to_string(r + 1));
    if (!(p >= 0.0 && p <= 1.0)) {
      throw ValidationError(path.string() + " row " + std::to_string(r + 1) + ": probability outside [0,1]");
    }
    rows.push_back({row[file_col], p, dataset.records[it->second].label});
  }
  return rows;
}

ExperimentReport baseline_report(const std::vector<std::filesystem::path>& prediction_files,
                                 const ingest::VersionDataset& dataset, Protocol protocol) {
  ExperimentReport report;
  report.protocol = protocol;
  report.reps = prediction_files.size();
  report.sources = {dataset.name()};
  report.target = dataset.name();
  report.created_at = utc_timestamp();
  for (std::size_t i = 0; i < prediction_files.size(); ++i) {
    RunRecord run;
    run.index = i;
    run.source = prediction_files[i].filename().string();
    run.target = dataset.name();
    run.predictions = read_baseline_predictions(prediction_files[i], dataset);
    std::vector<double> scores;
    std::vector<int> y;
    for (const auto& p : run.predictions) {
      scores.push_back(p.prob_defective);
      y.push_back(p.label);
    }
    run.metrics = evaluate(scores, y);
    report.runs.push_back(std::move(run));
  }
  report.medians = compute_medians(report.runs);
  return report;
}

// ----- serialization -----

json model_config_to_json(const model::ModelConfig& c) {
  return {{"hidden_size", c.hidden_size},
          {"graph_hops", c.graph_hops},
          {"lr", c.lr},
          {"batch_size", c.batch_size},
          {"mlp_hidden", c.mlp_hidden},
          {"sampling_ratio", c.sampling_ratio.to_string()},
          {"max_epochs", c.max_epochs},
          {"seed", c.seed},
          {"use_smote", c.use_smote},
          {"weighted_aggregation", c.weighted_aggregation}};
}

model::ModelConfig model_config_from_json(const json& j) {
  try {
    model::ModelConfig c;
    c.hidden_size = j.at("hidden_size").get<std::size_t>();
    c.graph_hops = j.at("graph_hops").get<std::size_t>();
    c.lr = j.at("lr").get<double>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.mlp_hidden = j.at("mlp_hidden").get<std::vector<std::size_t>>();
    c.sampling_ratio = sampling::SamplingRatio::parse(j.at("sampling_ratio").get<std::string>());
    c.max_epochs = j.at("max_epochs").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.use_smote = j.at("use_smote").get<bool>();
    c.weighted_aggregation = j.at("weighted_aggregation").get<bool>();
    return c;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("model config: ") + e.what());
  }
}

namespace {

json metrics_to_json(const MetricReport& m) {
  return {{"auc", m.auc},       {"recall", m.recall}, {"brier", m.brier}, {"pf", m.pf},
          {"f1", m.f1},         {"precision", m.precision},
          {"tp", m.tp},         {"fp", m.fp},         {"tn", m.tn},       {"fn", m.fn},
          {"degenerate", m.degenerate}};
}

MetricReport metrics_from_json(const json& j) {
  MetricReport m;
  m.auc = j.at("auc").get<double>();
  m.recall = j.at("recall").get<double>();
  m.brier = j.at("brier").get<double>();
  m.pf = j.at("pf").get<double>();
  m.f1 = j.at("f1").get<double>();
  m.precision = j.at("precision").get<double>();
  m.tp = j.at("tp").get<std::size_t>();
  m.fp = j.at("fp").get<std::size_t>();
  m.tn = j.at("tn").get<std::size_t>();
  m.fn = j.at("fn").get<std::size_t>();
  m.degenerate = j.at("degenerate").get<bool>();
  return m;
}

json medians_to_json(const Medians& m) {
  return {{"auc", m.auc}, {"recall", m.recall}, {"brier", m.brier}, {"pf", m.pf}, {"f1", m.f1}};
}

}  // namespace

json tests_to_json(const std::vector<StatTestResult>& tests) {
  json out = json::array();
  for (const auto& t : tests) {
    out.push_back({{"measure", t.measure},
                   {"p_value", t.p_value},
                   {"p_value_bonferroni", t.p_value_bonferroni},
                   {"cliffs_delta", t.cliffs_delta},
                   {"significant", t.significant},
                   {"large_effect", t.large_effect},
                   {"degenerate", t.degenerate}});
  }
  return out;
}

json report_to_json(const ExperimentReport& r) {
  json runs = json::array();
  for (const auto& run : r.runs) {
    runs.push_back({{"index", run.index},
                    {"seed", run.seed},
                    {"source", run.source},
                    {"target", run.target},
                    {"selected_epoch", run.selected_epoch},
                    {"redraws", run.redraws},
                    {"metrics", metrics_to_json(run.metrics)}});
  }
  return {{"format", "mvdp-report"},
          {"version", 1},
          {"protocol", to_string(r.protocol)},
          {"view", graph::to_string(r.view)},
          {"config", model_config_to_json(r.config)},
          {"build", {{"normalize", r.build.normalize}, {"sum_normalized_views", r.build.sum_normalized_views}}},
          {"seed", r.seed},
          {"reps", r.reps},
          {"sources", r.sources},
          {"target", r.target},
          {"runs", std::move(runs)},
          {"medians", medians_to_json(r.medians)},
          {"partial", r.partial},
          {"error", r.error},
          {"warnings", r.warnings},
          {"tests", tests_to_json(r.tests)},
          {"created_at", r.created_at}};
}

ExperimentReport report_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "mvdp-report") throw SchemaError("not an mvdp report");
    ExperimentReport r;
    r.protocol = parse_protocol(j.at("protocol").get<std::string>());
    r.view = graph::parse_view(j.at("view").get<std::string>());
    r.config = model_config_from_json(j.at("config"));
    r.build.normalize = j.at("build").at("normalize").get<bool>();
    r.build.sum_normalized_views = j.at("build").at("sum_normalized_views").get<bool>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.reps = j.at("reps").get<std::size_t>();
    r.sources = j.at("sources").get<std::vector<std::string>>();
    r.target = j.at("target").get<std::string>();
    for (const auto& run : j.at("runs")) {
      RunRecord rec;
      rec.index = run.at("index").get<std::size_t>();
      rec.seed = run.at("seed").get<std::uint64_t>();
      rec.source = run.at("source").get<std::string>();
      rec.target = run.at("target").get<std::string>();
      rec.selected_epoch = run.at("selected_epoch").get<std::size_t>();
      rec.redraws = run.at("redraws").get<std::size_t>();
      rec.metrics = metrics_from_json(run.at("metrics"));
      r.runs.push_back(std::move(rec));
    }
    r.medians = compute_medians(r.runs);
    r.partial = j.at("partial").get<bool>();
    r.error = j.at("error").get<std::string>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    for (const auto& t : j.at("tests")) {
      StatTestResult s;
      s.measure = t.at("measure").get<std::string>();
      s.p_value = t.at("p_value").get<double>();
      s.p_value_bonferroni = t.at("p_value_bonferroni").get<double>();
      s.cliffs_delta = t.at("cliffs_delta").get<double>();
      s.significant = t.at("significant").get<bool>();
      s.large_effect = t.at("large_effect").get<bool>();
      s.degenerate = t.at("degenerate").get<bool>();
      r.tests.push_back(std::move(s));
    }
    r.created_at = j.value("created_at", "");
    return r;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("report: ") + e.what());
  }
}

void write_report(const std::filesystem::path& path, const ExperimentReport& r) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << report_to_json(r).dump(2) << '\n';
}

ExperimentReport read_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return report_from_json(j);
}

void write_summary_csv(const std::filesystem::path& path, const ExperimentReport& r) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  csv::write_row(out, {"protocol", "view", "target", "runs", "auc", "recall", "brier", "pf", "f1"});
  csv::write_row(out, {std::string(to_string(r.protocol)), std::string(graph::to_string(r.view)), r.target,
                       std::to_string(r.runs.size()), csv::format_double(r.medians.auc),
                       csv::format_double(r.medians.recall), csv::format_double(r.medians.brier),
                       csv::format_double(r.medians.pf), csv::format_double(r.medians.f1)});
}

void write_predictions_csv(const std::filesystem::path& path, const std::vector<PredictionRow>& rows) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  csv::write_row(out, {"file", "prob_defective", "label"});
  for (const auto& r : rows) {
    csv::write_row(out, {r.file, csv::format_double(r.prob_defective), std::to_string(r.label)});
  }
}

void write_features_csv(const std::filesystem::path& path, const RunRecord& run) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  std::vector<std::string> header{"file", "label"};
  for (std::size_t k = 0; k < run.hidden.cols(); ++k) header.push_back("h" + std::to_string(k));
  csv::write_row(out, header);
  for (std::size_t i = 0; i < run.predictions.size(); ++i) {
    std::vector<std::string> fields{run.predictions[i].file, std::to_string(run.predictions[i].label)};
    for (double v : run.hidden.row(i)) fields.push_back(csv::format_double(v));
    csv::write_row(out, fields);
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace mvdp::eval
