#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "scengen/filter.hpp"
#include "scengen/model.hpp"
#include "scengen/types.hpp"

namespace scengen {

/// Resolved run configuration. Every default that the underlying method
/// prescribes lives here; a plain-text key-value file overrides defaults and
/// command-line flags override the file.
struct RunConfig {
  // paths
  std::string panel_path;
  std::string layout_path;
  std::string out_dir = "out";
  std::string model_path;  // default <out_dir>/model.json
  std::string portfolio_path;

  double delta = 1.0 / 250.0;

  // filter
  Index l_rescale = 20;
  Index l_extreme = 40;
  double eta = 4.0;
  Index violations = 4;
  double variance_floor = 1e-12;

  // model
  double rate_floor = 1e-4;
  bool include_hjm = true;
  bool include_fx_drift = true;
  std::string mu2;  // comma-separated J values; empty = zero

  // engine
  double jump_rate = 0.02;
  std::string time_change = "0.9:0.9,1.9:0.1";  // duration:probability atoms
  Index n_scenarios = 5000;
  std::uint64_t seed = 0;
  Index steps_per_day = 1;
  Index horizon_days = 1;
  Index threads = 1;

  // risk
  double confidence = 0.99;
  Index window_days = 250;
  Index calibration_days = 500;

  // report
  std::string report_factors;  // comma-separated column names; empty = all
  Index bins = 50;

  // validate
  double scale_fault = 1.0;

  std::string resolved_model_path() const { return model_path.empty() ? out_dir + "/model.json" : model_path; }

  FilterConfig filter_config() const;
  ModelConfig model_config(Index factor_count) const;
  TimeChangeDistribution time_change_distribution() const;

  /// Full resolved configuration, for embedding in every output file.
  std::map<std::string, std::string> echo() const;
};

/// Parses `key = value` lines; # starts a comment; unknown keys are rejected.
RunConfig load_run_config(const std::string& path);

/// Applies one key-value override (same keys as the config file).
void set_config_key(RunConfig& config, const std::string& key, const std::string& value);

} // namespace scengen
