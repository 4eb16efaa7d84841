#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mvdp/eval/metrics.hpp"
#include "mvdp/eval/stats.hpp"
#include "mvdp/graph.hpp"
#include "mvdp/ingest.hpp"
#include "mvdp/model.hpp"
#include "mvdp/sampling.hpp"

namespace mvdp::eval {

enum class Protocol { wpdp, cpdp };
std::string_view to_string(Protocol p);
Protocol parse_protocol(std::string_view text);

inline constexpr std::size_t kMeasureCount = 5;
inline constexpr std::array<std::string_view, kMeasureCount> kMeasures{"auc", "recall", "brier", "pf", "f1"};
double measure(const MetricReport& r, std::string_view name);

struct SplitFractions {
  double train = 0.7;
  double val = 0.15;
  double test = 0.15;
};
inline constexpr SplitFractions kWpdpSplit{0.7, 0.15, 0.15};
inline constexpr SplitFractions kCpdpSplit{0.8, 0.2, 0.0};

// Per-class shuffled split: each class contributes round(f * count) nodes to
// train and val, the rest to test.
sampling::NodeMasks stratified_split(const std::vector<int>& labels, const SplitFractions& fractions, Rng& rng);

struct PredictionRow {
  std::string file;
  double prob_defective = 0.0;
  int label = 0;
};

struct RunRecord {
  std::size_t index = 0;  // position in the campaign schedule
  std::uint64_t seed = 0;
  std::string source;
  std::string target;
  MetricReport metrics;
  std::size_t selected_epoch = 0;
  std::size_t redraws = 0;  // splits discarded before this one was used
  // Not serialized into the report: per evaluated node, the prediction and
  // the final node representation (same row order).
  std::vector<PredictionRow> predictions;
  Tensor hidden;
};

struct Medians {
  double auc = 0.0;
  double recall = 0.0;
  double brier = 0.0;
  double pf = 0.0;
  double f1 = 0.0;
  friend bool operator==(const Medians&, const Medians&) = default;
};
double median(std::vector<double> values);
Medians compute_medians(const std::vector<RunRecord>& runs);

struct ExperimentOptions {
  graph::View view = graph::View::MSDG;
  std::size_t reps = 100;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  graph::BuildOptions build;
};

struct ExperimentReport {
  Protocol protocol = Protocol::wpdp;
  graph::View view = graph::View::MSDG;
  model::ModelConfig config;
  graph::BuildOptions build;
  std::uint64_t seed = 0;
  std::size_t reps = 0;
  std::vector<std::string> sources;
  std::string target;
  std::vector<RunRecord> runs;  // ordered by index
  Medians medians;
  bool partial = false;
  std::string error;  // first failure when partial
  std::vector<std::string> warnings;
  std::vector<StatTestResult> tests;
  std::string created_at;
};

// Repetition i uses Rng::derive(seed, i). Each repetition draws a fresh
// 70/15/15 split (redrawn while train or test is single-class), trains on
// the normalized dataset's graph and reports test-split metrics. A failing
// repetition marks the report partial; the remaining ones still run.
ExperimentReport run_wpdp(const ingest::VersionDataset& dataset, const model::ModelConfig& config,
                          const ExperimentOptions& options);

// 80/20 train/val split of the source, evaluation on every target node over
// the target's own graph. Throws ValidationError when the manifests differ.
ExperimentReport run_cpdp(const ingest::VersionDataset& source, const ingest::VersionDataset& target,
                          const model::ModelConfig& config, const ExperimentOptions& options);

// One CPDP report over `reps` repetitions of every source in order; run
// index = source_index * reps + repetition.
ExperimentReport run_cpdp_campaign(const std::vector<ingest::VersionDataset>& sources,
                                   const ingest::VersionDataset& target, const model::ModelConfig& config,
                                   const ExperimentOptions& options);

// Median over repetitions of the validation metric at the selected epoch,
// using WPDP splits; the score maximized by hyperparameter search.
double tuning_score(const ingest::VersionDataset& dataset, const model::ModelConfig& config,
                    const ExperimentOptions& options);

// Wilcoxon and Cliff's delta per measure on runs paired by index, Bonferroni
// over the five measures. Throws UsageError on unequal run counts.
std::vector<StatTestResult> compare_reports(const ExperimentReport& a, const ExperimentReport& b);

// A report built from external per-repetition prediction files
// (`file,prob_defective`), scored against the dataset's labels.
ExperimentReport baseline_report(const std::vector<std::filesystem::path>& prediction_files,
                                 const ingest::VersionDataset& dataset, Protocol protocol);
std::vector<PredictionRow> read_baseline_predictions(const std::filesystem::path& path,
                                                     const ingest::VersionDataset& dataset);

nlohmann::json model_config_to_json(const model::ModelConfig& c);
model::ModelConfig model_config_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const ExperimentReport& r);
ExperimentReport report_from_json(const nlohmann::json& j);
void write_report(const std::filesystem::path& path, const ExperimentReport& r);
ExperimentReport read_report(const std::filesystem::path& path);
void write_summary_csv(const std::filesystem::path& path, const ExperimentReport& r);
void write_predictions_csv(const std::filesystem::path& path, const std::vector<PredictionRow>& rows);
// `file,label,h0,h1,...` from a run's node representations.
void write_features_csv(const std::filesystem::path& path, const RunRecord& run);
nlohmann::json tests_to_json(const std::vector<StatTestResult>& tests);

// "YYYY-MM-DDTHH:MM:SSZ" from the system clock; the only non-reproducible
// field of a report.
std::string utc_timestamp();

}  // namespace mvdp::eval
