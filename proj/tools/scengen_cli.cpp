#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "scengen/config.hpp"
#include "scengen/engine.hpp"
#include "scengen/filter.hpp"
#include "scengen/model.hpp"
#include "scengen/panel.hpp"
#include "scengen/risk.hpp"
#include "scengen/validation.hpp"

namespace {

using namespace scengen;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::AllReturnsExtreme:
    case Errc::EmptyJumpMeasure:
      return 3;
    case Errc::BadModelFile:
      return 4;
    default:
      return 2;
  }
}

struct Overrides {
  std::optional<std::string> config;
  std::map<std::string, std::string> values;  // config-file keys
};

void add_common_options(CLI::App* cmd, Overrides& ov) {
  cmd->add_option("--config", ov.config, "run configuration file (key = value lines)");
  const auto stage = [&ov, cmd](const std::string& flag, const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&ov, key](const std::string& v) { ov.values[key] = v; }, help);
  };
  stage("--panel", "panel", "historical panel CSV");
  stage("--layout", "layout", "factor layout file");
  stage("--out", "out", "output directory");
  stage("--model", "model", "model file path");
  stage("--portfolio", "portfolio", "portfolio file");
  stage("--seed", "seed", "RNG seed");
  stage("--scenarios", "scenarios", "number of scenarios");
  stage("--eta", "eta", "extreme-event level");
  stage("--violations", "violations", "extreme-event violation count M");
  stage("--jump-rate", "jump_rate", "per-day jump probability");
  stage("--confidence", "confidence", "VaR/ES confidence level");
  stage("--threads", "threads", "worker threads");
  stage("--horizon-days", "horizon_days", "simulation horizon in days");
  stage("--steps-per-day", "steps_per_day", "Euler substeps per day");
  stage("--window-days", "window_days", "backtest window length");
  stage("--calibration-days", "calibration_days", "trailing observations per backtest day");
  stage("--bins", "bins", "histogram bin count");
  stage("--report-factors", "report_factors", "comma-separated factor columns to report");
  stage("--scale-fault", "scale_fault", "multiply the calibrated scale (fault-injection hook)");
}

RunConfig resolve_config(const Overrides& ov) {
  RunConfig config;
  if (ov.config) config = load_run_config(*ov.config);
  for (const auto& [key, value] : ov.values) set_config_key(config, key, value);
  return config;
}

std::string require(const std::string& value, const std::string& what) {
  if (value.empty()) raise(Errc::BadConfig, "no " + what + " configured (flag or config file)");
  return value;
}

HistoricalPanel load_inputs(const RunConfig& config) {
  const FactorLayout layout = load_layout_file(require(config.layout_path, "layout path"));
  return load_panel_file(require(config.panel_path, "panel path"), layout, config.delta);
}

SimulationConfig simulation_config(const RunConfig& config) {
  SimulationConfig sim;
  sim.n_scenarios = config.n_scenarios;
  sim.horizon_steps = config.horizon_days;
  sim.seed = config.seed;
  sim.steps_per_day = config.steps_per_day;
  sim.threads = config.threads;
  return sim;
}

int cmd_calibrate(const RunConfig& config) {
  const HistoricalPanel panel = load_inputs(config);
  const FactorLayout& layout = panel.layout;
  const FilterResult filtered = run_filter(panel, config.filter_config());
  const CalibratedModel model =
      build_calibrated_model(panel, filtered.filtered, filtered.extremes, config.model_config(layout.factor_count()));

  std::filesystem::create_directories(config.out_dir);
  save_model(model, config.resolved_model_path(), config.echo());

  std::cout << "calibrated " << model.driver_count() << " drivers from " << panel.observation_count()
            << " observations (" << filtered.extremes.indices.size() << " extreme events at eta=" << config.eta
            << ", M=" << config.violations << ")\n";
  if (model.jumps.rate_clamped)
    std::cout << "note: no extreme events found; jump rate clamped to 0\n";
  const auto names = layout.column_names();
  std::cout << "per-factor volatility (today, per sqrt(day)):\n";
  for (Index j = 0; j < layout.factor_count(); ++j)
    std::cout << "  " << names[static_cast<std::size_t>(j)] << " " << std::sqrt(filtered.today_variance(j)) << "\n";
  std::cout << "model written to " << config.resolved_model_path() << "\n";
  return 0;
}

int cmd_simulate(const RunConfig& config) {
  const CalibratedModel model = load_model(config.resolved_model_path());
  const ScenarioSet set = simulate_scenarios(model, simulation_config(config));

  std::filesystem::create_directories(config.out_dir);
  const std::string path = config.out_dir + "/scenarios.csv";
  save_scenarios_file(set, model.layout, path, config.echo());
  save_scenarios_json(set, model.layout, config.out_dir + "/scenarios.json", config.echo());

  Index total_jumps = 0;
  double mean_tau = 0.0;
  for (const auto& audit : set.audit) {
    total_jumps += audit.jump_count;
    mean_tau += audit.tau_days;
  }
  mean_tau /= static_cast<double>(set.audit.size());
  std::cout << set.states.rows() << " scenarios written to " << path << " (jumps: " << total_jumps
            << ", mean tau: " << mean_tau << " days)\n";
  return 0;
}

int cmd_backtest(const RunConfig& config) {
  const HistoricalPanel panel = load_inputs(config);
  const FactorLayout& layout = panel.layout;
  const Portfolio portfolio = load_portfolio_file(require(config.portfolio_path, "portfolio path"), layout);

  BacktestConfig bt;
  bt.window_days = config.window_days;
  bt.calibration_days = config.calibration_days;
  bt.confidence = config.confidence;
  bt.filter = config.filter_config();
  bt.model = config.model_config(layout.factor_count());
  bt.simulation = simulation_config(config);

  const BacktestReport report = backtest(panel, portfolio, bt);
  std::filesystem::create_directories(config.out_dir);
  const std::string path = config.out_dir + "/backtest.csv";
  save_backtest_file(report, path, config.echo());
  std::cout << report.days.size() << " backtest days at " << config.confidence * 100 << "% confidence: "
            << report.var_violations << " VaR violations, " << report.es_breaches << " ES breaches\n"
            << "report written to " << path << "\n";
  return 0;
}

int cmd_validate(const RunConfig& config) {
  validation::Params params;
  params.seed = config.seed;
  params.n_scenarios = config.n_scenarios;
  params.threads = config.threads;
  params.scale_fault = config.scale_fault;
  const auto results = validation::run_all(params);

  std::filesystem::create_directories(config.out_dir);
  const std::string path = config.out_dir + "/validate.csv";
  std::ofstream out(path);
  if (!out) raise(Errc::IoError, "cannot write " + path);
  for (const auto& [key, value] : config.echo()) out << "# " << key << " = " << value << '\n';
  out << "check,passed,observed,bound,detail\n";

  bool all_passed = true;
  for (const auto& r : results) {
    all_passed = all_passed && r.passed;
    std::printf("%-26s %s  observed=%.6g bound=%.6g  %s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL", r.observed,
                r.bound, r.detail.c_str());
    out << r.name << ',' << (r.passed ? 1 : 0) << ',' << r.observed << ',' << r.bound << ",\"" << r.detail << "\"\n";
  }
  std::cout << "results written to " << path << "\n";
  return all_passed ? 0 : 5;
}

int cmd_report(const RunConfig& config) {
  const HistoricalPanel panel = load_inputs(config);
  const FactorLayout& layout = panel.layout;
  const FilterResult filtered = run_filter(panel, config.filter_config());
  const CalibratedModel model =
      build_calibrated_model(panel, filtered.filtered, filtered.extremes, config.model_config(layout.factor_count()));
  const ScenarioSet set = simulate_scenarios(model, simulation_config(config));
  const Matrix increments = set.states.rowwise() - model.anchor_state.transpose();

  const auto names = layout.column_names();
  std::vector<Index> factors;
  if (config.report_factors.empty()) {
    for (Index j = 0; j < layout.factor_count(); ++j) factors.push_back(j);
  } else {
    std::istringstream items(config.report_factors);
    std::string item;
    while (std::getline(items, item, ',')) {
      const auto begin = item.find_first_not_of(" \t");
      const auto end = item.find_last_not_of(" \t");
      if (begin == std::string::npos) continue;
      item = item.substr(begin, end - begin + 1);
      const auto it = std::find(names.begin(), names.end(), item);
      if (it == names.end()) raise(Errc::UnknownColumn, "unknown report factor: " + item);
      factors.push_back(static_cast<Index>(it - names.begin()));
    }
  }

  std::filesystem::create_directories(config.out_dir);
  char buf[40];
  for (Index j : factors) {
    const Vector historical = filtered.filtered.values.col(j);
    const Vector simulated = increments.col(j);
    double lo = std::min(historical.minCoeff(), simulated.minCoeff());
    double hi = std::max(historical.maxCoeff(), simulated.maxCoeff());
    if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    }
    const Histogram hist_a = make_histogram(historical, config.bins, lo, hi);
    const Histogram hist_b = make_histogram(simulated, config.bins, lo, hi);

    const std::string path = config.out_dir + "/hist_" + names[static_cast<std::size_t>(j)] + ".csv";
    std::ofstream out(path);
    if (!out) raise(Errc::IoError, "cannot write " + path);
    for (const auto& [key, value] : config.echo()) out << "# " << key << " = " << value << '\n';
    out << "bin_left,bin_right,historical_count,simulated_count\n";
    for (std::size_t b = 0; b < hist_a.counts.size(); ++b) {
      std::snprintf(buf, sizeof(buf), "%.17g", hist_a.edges(static_cast<Index>(b)));
      out << buf << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", hist_a.edges(static_cast<Index>(b) + 1));
      out << buf << ',' << hist_a.counts[b] << ',' << hist_b.counts[b] << '\n';
    }
    std::cout << "histogram written to " << path << "\n";
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"scengen - empirical SDE scenario generation and risk engine"};
  app.require_subcommand(1);

  Overrides ov_calibrate, ov_simulate, ov_backtest, ov_validate, ov_report;
  auto* calibrate = app.add_subcommand("calibrate", "calibrate a model from a historical panel");
  add_common_options(calibrate, ov_calibrate);
  auto* simulate = app.add_subcommand("simulate", "simulate scenarios from a calibrated model");
  add_common_options(simulate, ov_simulate);
  auto* backtest_cmd = app.add_subcommand("backtest", "rolling VaR/ES backtest on a panel");
  add_common_options(backtest_cmd, ov_backtest);
  auto* validate = app.add_subcommand("validate", "run the statistical property checks");
  add_common_options(validate, ov_validate);
  auto* report = app.add_subcommand("report", "export historical vs simulated histograms");
  add_common_options(report, ov_report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (calibrate->parsed()) return cmd_calibrate(resolve_config(ov_calibrate));
    if (simulate->parsed()) return cmd_simulate(resolve_config(ov_simulate));
    if (backtest_cmd->parsed()) return cmd_backtest(resolve_config(ov_backtest));
    if (validate->parsed()) return cmd_validate(resolve_config(ov_validate));
    if (report->parsed()) return cmd_report(resolve_config(ov_report));
  } catch (const scengen::Error& e) {
    std::cerr << "error [" << scengen::errc_name(e.code()) << "]: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
