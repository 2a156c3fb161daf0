#include "scengen/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace scengen {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    raise(Errc::BadConfig, "bad numeric value for " + key + ": " + value);
  }
}

Index parse_index(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return static_cast<Index>(v);
  } catch (const std::exception&) {
    raise(Errc::BadConfig, "bad integer value for " + key + ": " + value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  raise(Errc::BadConfig, "bad boolean value for " + key + ": " + value);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

} // namespace

FilterConfig RunConfig::filter_config() const {
  FilterConfig fc;
  fc.l_rescale = l_rescale;
  fc.l_extreme = l_extreme;
  fc.eta = eta;
  fc.violations = violations;
  fc.variance_floor = variance_floor;
  return fc;
}

TimeChangeDistribution RunConfig::time_change_distribution() const {
  TimeChangeDistribution dist;
  dist.atoms.clear();
  std::istringstream atoms(time_change);
  std::string atom;
  while (std::getline(atoms, atom, ',')) {
    atom = trim(atom);
    if (atom.empty()) continue;
    const auto colon = atom.find(':');
    if (colon == std::string::npos)
      raise(Errc::BadConfig, "time_change atom must be duration:probability, got " + atom);
    dist.atoms.emplace_back(parse_double("time_change", trim(atom.substr(0, colon))),
                            parse_double("time_change", trim(atom.substr(colon + 1))));
  }
  dist.validate();
  return dist;
}

ModelConfig RunConfig::model_config(Index factor_count) const {
  ModelConfig mc;
  mc.rate_floor = rate_floor;
  mc.include_hjm = include_hjm;
  mc.include_fx_drift = include_fx_drift;
  mc.jump_rate = jump_rate;
  mc.time_change = time_change_distribution();
  if (!mu2.empty()) {
    std::vector<double> entries;
    std::istringstream items(mu2);
    std::string item;
    while (std::getline(items, item, ',')) entries.push_back(parse_double("mu2", trim(item)));
    if (static_cast<Index>(entries.size()) != factor_count)
      raise(Errc::LengthMismatch, "mu2 has " + std::to_string(entries.size()) + " entries for " +
                                      std::to_string(factor_count) + " factors");
    mc.mu2 = Eigen::Map<const Vector>(entries.data(), static_cast<Index>(entries.size()));
  }
  return mc;
}

void set_config_key(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "panel") c.panel_path = value;
  else if (key == "layout") c.layout_path = value;
  else if (key == "out") c.out_dir = value;
  else if (key == "model") c.model_path = value;
  else if (key == "portfolio") c.portfolio_path = value;
  else if (key == "delta") c.delta = parse_double(key, value);
  else if (key == "l_rescale") c.l_rescale = parse_index(key, value);
  else if (key == "l_extreme") c.l_extreme = parse_index(key, value);
  else if (key == "eta") c.eta = parse_double(key, value);
  else if (key == "violations") c.violations = parse_index(key, value);
  else if (key == "variance_floor") c.variance_floor = parse_double(key, value);
  else if (key == "rate_floor") c.rate_floor = parse_double(key, value);
  else if (key == "include_hjm") c.include_hjm = parse_bool(key, value);
  else if (key == "include_fx_drift") c.include_fx_drift = parse_bool(key, value);
  else if (key == "mu2") c.mu2 = value;
  else if (key == "jump_rate") c.jump_rate = parse_double(key, value);
  else if (key == "time_change") c.time_change = value;
  else if (key == "scenarios") c.n_scenarios = parse_index(key, value);
  else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_index(key, value));
  else if (key == "steps_per_day") c.steps_per_day = parse_index(key, value);
  else if (key == "horizon_days") c.horizon_days = parse_index(key, value);
  else if (key == "threads") c.threads = parse_index(key, value);
  else if (key == "confidence") c.confidence = parse_double(key, value);
  else if (key == "window_days") c.window_days = parse_index(key, value);
  else if (key == "calibration_days") c.calibration_days = parse_index(key, value);
  else if (key == "report_factors") c.report_factors = value;
  else if (key == "bins") c.bins = parse_index(key, value);
  else if (key == "scale_fault") c.scale_fault = parse_double(key, value);
  else raise(Errc::BadConfig, "unknown config key: " + key);
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(Errc::IoError, "cannot open config file: " + path);
  RunConfig config;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      raise(Errc::BadConfig, "config line " + std::to_string(line_no) + " is not key = value");
    set_config_key(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return config;
}

std::map<std::string, std::string> RunConfig::echo() const {
  std::map<std::string, std::string> m;
  m["panel"] = panel_path;
  m["layout"] = layout_path;
  m["out"] = out_dir;
  m["model"] = resolved_model_path();
  m["portfolio"] = portfolio_path;
  m["delta"] = format_double(delta);
  m["l_rescale"] = std::to_string(l_rescale);
  m["l_extreme"] = std::to_string(l_extreme);
  m["eta"] = format_double(eta);
  m["violations"] = std::to_string(violations);
  m["variance_floor"] = format_double(variance_floor);
  m["rate_floor"] = format_double(rate_floor);
  m["include_hjm"] = include_hjm ? "true" : "false";
  m["include_fx_drift"] = include_fx_drift ? "true" : "false";
  m["mu2"] = mu2;
  m["jump_rate"] = format_double(jump_rate);
  m["time_change"] = time_change;
  m["scenarios"] = std::to_string(n_scenarios);
  m["seed"] = std::to_string(seed);
  m["steps_per_day"] = std::to_string(steps_per_day);
  m["horizon_days"] = std::to_string(horizon_days);
  m["threads"] = std::to_string(threads);
  m["confidence"] = format_double(confidence);
  m["window_days"] = std::to_string(window_days);
  m["calibration_days"] = std::to_string(calibration_days);
  m["report_factors"] = report_factors;
  m["bins"] = std::to_string(bins);
  m["scale_fault"] = format_double(scale_fault);
  return m;
}

} // namespace scengen
