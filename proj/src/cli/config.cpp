#include "mvdp/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "mvdp/csv.hpp"
#include "mvdp/error.hpp"

namespace mvdp::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

std::size_t parse_size(const std::string& key, const std::string& v) {
  try {
    const long long x = csv::parse_int(v, key);
    if (x < 0) throw ConfigError(key + " must be non-negative");
    return static_cast<std::size_t>(x);
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
}

double parse_real(const std::string& key, const std::string& v) {
  try {
    return csv::parse_double(v, key);
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
}

std::vector<std::size_t> parse_sizes(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  std::stringstream ss(v);
  std::string part;
  while (std::getline(ss, part, ',')) out.push_back(parse_size(key, trim(part)));
  if (out.empty()) throw ConfigError(key + " needs at least one layer size");
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& v) {
  std::filesystem::path p(v);
  return p.is_absolute() || base.empty() ? p : base / p;
}

std::string join_sizes(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (protocol == eval::Protocol::wpdp) {
    if (dataset.empty()) throw ConfigError("wpdp needs a `dataset` directory");
  } else {
    if (sources.empty()) throw ConfigError("cpdp needs at least one `source` directory");
    if (target.empty()) throw ConfigError("cpdp needs a `target` directory");
  }
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
  model.validate();
  model::SearchSpace{}.require(model);
}

void RunConfig::require_paths() const {
  std::vector<std::filesystem::path> dirs;
  if (protocol == eval::Protocol::wpdp) {
    dirs.push_back(dataset);
  } else {
    dirs = sources;
    dirs.push_back(target);
  }
  for (const auto& d : dirs) {
    if (!std::filesystem::is_directory(d)) throw IoError("dataset directory not found: " + d.string());
  }
}

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
  RunConfig c;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key != "source" && !seen.insert(key).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": key '" + key + "' given twice");
    }
    if (key == "protocol") {
      c.protocol = eval::parse_protocol(value);
    } else if (key == "dataset") {
      c.dataset = resolve(base_dir, value);
    } else if (key == "source") {
      c.sources.push_back(resolve(base_dir, value));
    } else if (key == "target") {
      c.target = resolve(base_dir, value);
    } else if (key == "view") {
      try {
        c.view = graph::parse_view(value);
      } catch (const Error& e) {
        throw ConfigError(e.what());
      }
    } else if (key == "hidden_size") {
      c.model.hidden_size = parse_size(key, value);
    } else if (key == "graph_hops") {
      c.model.graph_hops = parse_size(key, value);
    } else if (key == "lr") {
      c.model.lr = parse_real(key, value);
    } else if (key == "batch_size") {
      c.model.batch_size = parse_size(key, value);
    } else if (key == "mlp_hidden") {
      c.model.mlp_hidden = parse_sizes(key, value);
    } else if (key == "sampling_ratio") {
      c.model.sampling_ratio = sampling::SamplingRatio::parse(value);
    } else if (key == "max_epochs") {
      c.model.max_epochs = parse_size(key, value);
    } else if (key == "use_smote") {
      c.model.use_smote = parse_bool(key, value);
    } else if (key == "weighted_aggregation") {
      c.model.weighted_aggregation = parse_bool(key, value);
    } else if (key == "normalize_edges") {
      c.build.normalize = parse_bool(key, value);
    } else if (key == "sum_normalized_views") {
      c.build.sum_normalized_views = parse_bool(key, value);
    } else if (key == "reps") {
      c.reps = parse_size(key, value);
      if (c.reps < 1) throw ConfigError("reps must be at least 1");
    } else if (key == "seed") {
      c.seed = static_cast<std::uint64_t>(parse_size(key, value));
    } else if (key == "out_dir") {
      c.out_dir = resolve(base_dir, value);
    } else if (key == "jobs") {
      c.jobs = parse_size(key, value);
    } else if (key == "dump_predictions") {
      c.dump_predictions = parse_bool(key, value);
    } else {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  c.model.seed = c.seed;
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str(), path.parent_path());
}

std::string format_run_config(const RunConfig& c) {
  std::ostringstream out;
  out << "protocol = " << eval::to_string(c.protocol) << '\n';
  if (!c.dataset.empty()) out << "dataset = " << c.dataset.string() << '\n';
  for (const auto& s : c.sources) out << "source = " << s.string() << '\n';
  if (!c.target.empty()) out << "target = " << c.target.string() << '\n';
  std::string view(graph::to_string(c.view));
  for (char& ch : view) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  out << "view = " << view << '\n';
  out << "hidden_size = " << c.model.hidden_size << '\n';
  out << "graph_hops = " << c.model.graph_hops << '\n';
  out << "lr = " << csv::format_double(c.model.lr) << '\n';
  out << "batch_size = " << c.model.batch_size << '\n';
  out << "mlp_hidden = " << join_sizes(c.model.mlp_hidden) << '\n';
  out << "sampling_ratio = " << c.model.sampling_ratio.to_string() << '\n';
  out << "max_epochs = " << c.model.max_epochs << '\n';
  out << "use_smote = " << (c.model.use_smote ? "true" : "false") << '\n';
  out << "weighted_aggregation = " << (c.model.weighted_aggregation ? "true" : "false") << '\n';
  out << "normalize_edges = " << (c.build.normalize ? "true" : "false") << '\n';
  out << "sum_normalized_views = " << (c.build.sum_normalized_views ? "true" : "false") << '\n';
  if (c.reps != 0) out << "reps = " << c.reps << '\n';
  out << "seed = " << c.seed << '\n';
  out << "out_dir = " << c.out_dir.string() << '\n';
  out << "jobs = " << c.jobs << '\n';
  out << "dump_predictions = " << (c.dump_predictions ? "true" : "false") << '\n';
  return out.str();
}

eval::ExperimentOptions experiment_options(const RunConfig& c) {
  eval::ExperimentOptions o;
  o.view = c.view;
  o.reps = c.effective_reps();
  o.seed = c.seed;
  o.jobs = c.jobs;
  o.build = c.build;
  return o;
}

}  // namespace mvdp::cli
