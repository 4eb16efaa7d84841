#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mvdp/eval/protocol.hpp"
#include "mvdp/graph.hpp"
#include "mvdp/model.hpp"

namespace mvdp::cli {

// Everything an experiment or tuning run needs. Stored as flat `key = value`
// lines; `#` starts a comment and `source` may repeat.
struct RunConfig {
  eval::Protocol protocol = eval::Protocol::wpdp;
  std::filesystem::path dataset;               // wpdp
  std::vector<std::filesystem::path> sources;  // cpdp
  std::filesystem::path target;                // cpdp
  graph::View view = graph::View::MSDG;
  model::ModelConfig model;
  graph::BuildOptions build;
  std::size_t reps = 0;  // 0 = protocol default (100 wpdp, 20 cpdp)
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = ".";
  std::size_t jobs = 1;
  bool dump_predictions = false;

  std::size_t effective_reps() const { return reps != 0 ? reps : protocol == eval::Protocol::wpdp ? 100 : 20; }
  // Required paths per protocol, reps >= 1 when set, model fields inside the
  // tuning grid. Throws ConfigError.
  void validate() const;
  // Throws IoError naming the first dataset directory that does not exist.
  void require_paths() const;
};

// Relative paths are resolved against `base_dir`. Throws ConfigError on
// unknown keys, repeated keys, or malformed values.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);
std::string format_run_config(const RunConfig& config);

eval::ExperimentOptions experiment_options(const RunConfig& config);

}  // namespace mvdp::cli
