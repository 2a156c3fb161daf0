#include "scengen/engine.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "scengen/shift.hpp"

namespace scengen {

double sample_time_change(const TimeChangeDistribution& dist, Philox4x32& rng) {
  dist.validate();
  if (dist.atoms.size() == 1) return dist.atoms.front().first;
  const double u = rng.uniform01();
  double cumulative = 0.0;
  for (const auto& [duration, prob] : dist.atoms) {
    cumulative += prob;
    if (u < cumulative) return duration;
  }
  return dist.atoms.back().first;
}

std::optional<Vector> maybe_jump(const JumpSpec& jumps, const GeometricSigma& sigma, const Vector& state,
                                 Philox4x32& rng, Index* source) {
  if (jumps.rate <= 0.0) return std::nullopt;
  if (jumps.measure.cols() == 0)
    raise(Errc::EmptyJumpMeasure, "jump rate is positive but the extreme-event measure is empty");
  if (rng.uniform01() >= jumps.rate) return std::nullopt;
  const Index n = jumps.measure.cols();
  Index pick = static_cast<Index>(rng.uniform01() * static_cast<double>(n));
  if (pick >= n) pick = n - 1;
  if (source) *source = jumps.source_indices.empty() ? pick : jumps.source_indices[static_cast<std::size_t>(pick)];
  return sigma.apply(state, jumps.measure.col(pick));
}

Vector euler_step(const CalibratedModel& model, const Vector& state, double dt, Philox4x32& rng, StepInfo* info,
                  bool allow_jump) {
  if (dt < 0.0) raise(Errc::NegativeTime, "Euler step length must be nonnegative");
  if (state.size() != model.layout.factor_count())
    raise(Errc::LengthMismatch, "state length does not match model layout");

  Vector y = state;
  if (allow_jump && model.jumps.rate > 0.0) {
    Index source = -1;
    if (auto jump = maybe_jump(model.jumps, model.sigma, y, rng, &source)) {
      y += *jump;
      if (info) {
        info->jumped = true;
        info->jump_source = source;
      }
    }
  }
  if (dt == 0.0) return y;

  const Vector drift = model.total_drift(y);

  Vector z(model.driver_count());
  for (Index i = 0; i < z.size(); ++i) z(i) = rng.gaussian();
  const Vector diffusion = std::sqrt(dt) * model.scale * model.sigma.apply(y, model.directions * z);

  Vector next(y.size());
  const Index n = model.layout.tenor_count();
  for (Index c = 0; c < model.layout.currency_count() && n > 0; ++c) {
    const Index off = model.layout.curve_offset(c);
    next.segment(off, n) = apply_shift(y.segment(off, n), model.layout.tenor_grid(), dt);
  }
  for (Index c = 1; c < model.layout.currency_count(); ++c)
    next(model.layout.fx_index(c)) = y(model.layout.fx_index(c));

  next += dt * drift + diffusion;
  if (!next.allFinite())
    raise(Errc::NonFiniteState, "Euler step produced a non-finite state (dt=" + std::to_string(dt) + ")");
  return next;
}

ScenarioSet simulate_scenarios(const CalibratedModel& model, const SimulationConfig& config) {
  if (config.n_scenarios < 1) raise(Errc::BadConfig, "need at least one scenario");
  if (config.horizon_steps < 1) raise(Errc::BadConfig, "horizon must be at least one day step");
  if (config.steps_per_day < 1) raise(Errc::BadConfig, "need at least one Euler substep per day");
  model.time_change.validate();

  ScenarioSet set;
  set.states.resize(config.n_scenarios, model.layout.factor_count());
  set.audit.resize(static_cast<std::size_t>(config.n_scenarios));

  auto run_scenario = [&](Index s) {
    Philox4x32 rng(config.seed, static_cast<std::uint64_t>(s));
    ScenarioAudit& audit = set.audit[static_cast<std::size_t>(s)];
    audit.tau_days = sample_time_change(model.time_change, rng);
    const double day_dt = audit.tau_days * model.delta;
    const double sub_dt = day_dt / static_cast<double>(config.steps_per_day);
    Vector state = model.anchor_state;
    for (Index day = 0; day < config.horizon_steps; ++day) {
      for (Index sub = 0; sub < config.steps_per_day; ++sub) {
        StepInfo step;
        // one jump trigger per simulated day; substeps only refine diffusion
        state = euler_step(model, state, sub_dt, rng, &step, sub == 0);
        if (step.jumped) {
          ++audit.jump_count;
          audit.jump_sources.push_back(step.jump_source);
        }
      }
    }
    set.states.row(s) = state.transpose();
  };

  const Index n_threads = std::max<Index>(1, config.threads);
  if (n_threads == 1) {
    for (Index s = 0; s < config.n_scenarios; ++s) {
      try {
        run_scenario(s);
      } catch (const Error& e) {
        throw Error(e.code(), "scenario " + std::to_string(s) + ": " + e.what());
      }
    }
  } else {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(n_threads));
    const Index chunk = (config.n_scenarios + n_threads - 1) / n_threads;
    for (Index t = 0; t < n_threads; ++t) {
      const Index begin = t * chunk;
      const Index end = std::min(config.n_scenarios, begin + chunk);
      workers.emplace_back([&, t, begin, end] {
        try {
          for (Index s = begin; s < end; ++s) run_scenario(s);
        } catch (...) {
          failures[static_cast<std::size_t>(t)] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (const auto& failure : failures)
      if (failure) std::rethrow_exception(failure);
  }
  return set;
}

void save_scenarios(const ScenarioSet& set, const FactorLayout& layout, std::ostream& out,
                    const std::map<std::string, std::string>& config_echo) {
  for (const auto& [key, value] : config_echo) out << "# " << key << " = " << value << '\n';
  const auto names = layout.column_names();
  for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
  out << ",tau_days,n_jumps\n";
  char buf[40];
  for (Index s = 0; s < set.states.rows(); ++s) {
    for (Index j = 0; j < set.states.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", set.states(s, j));
      out << (j ? "," : "") << buf;
    }
    const auto& audit = set.audit[static_cast<std::size_t>(s)];
    std::snprintf(buf, sizeof(buf), "%.17g", audit.tau_days);
    out << ',' << buf << ',' << audit.jump_count << '\n';
  }
}

void save_scenarios_file(const ScenarioSet& set, const FactorLayout& layout, const std::string& path,
                         const std::map<std::string, std::string>& config_echo) {
  std::ofstream out(path);
  if (!out) raise(Errc::IoError, "cannot write scenario CSV: " + path);
  save_scenarios(set, layout, out, config_echo);
}

void save_scenarios_json(const ScenarioSet& set, const FactorLayout& layout, const std::string& path,
                         const std::map<std::string, std::string>& config_echo) {
  nlohmann::json j;
  j["format_version"] = 1;
  j["kind"] = "scengen-scenarios";
  j["layout"]["currencies"] = layout.currencies();
  j["layout"]["tenors"] = layout.tenor_grid();
  j["columns"] = layout.column_names();
  nlohmann::json states = nlohmann::json::array();
  for (Index s = 0; s < set.states.rows(); ++s) {
    nlohmann::json row = nlohmann::json::array();
    for (Index c = 0; c < set.states.cols(); ++c) row.push_back(set.states(s, c));
    states.push_back(std::move(row));
  }
  j["states"] = std::move(states);
  nlohmann::json tau = nlohmann::json::array(), jumps = nlohmann::json::array(), sources = nlohmann::json::array();
  for (const auto& audit : set.audit) {
    tau.push_back(audit.tau_days);
    jumps.push_back(audit.jump_count);
    sources.push_back(audit.jump_sources);
  }
  j["audit"]["tau_days"] = std::move(tau);
  j["audit"]["n_jumps"] = std::move(jumps);
  j["audit"]["jump_sources"] = std::move(sources);
  j["config_echo"] = config_echo;

  std::ofstream out(path);
  if (!out) raise(Errc::IoError, "cannot write scenario JSON: " + path);
  out << j.dump(1) << '\n';
}

} // namespace scengen
