#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scengen/model.hpp"
#include "scengen/rng.hpp"
#include "scengen/types.hpp"

namespace scengen {

struct SimulationConfig {
  Index n_scenarios = 5000;
  Index horizon_steps = 1;   // day steps
  std::uint64_t seed = 0;
  Index steps_per_day = 1;   // Euler substeps per day (diffusive refinement only)
  Index threads = 1;
};

struct ScenarioAudit {
  double tau_days = 0.0;
  Index jump_count = 0;
  std::vector<Index> jump_sources;  // series index of each applied jump
};

struct ScenarioSet {
  Matrix states;  // n_scenarios x J
  std::vector<ScenarioAudit> audit;
};

/// One day duration drawn from the time-change atoms.
double sample_time_change(const TimeChangeDistribution& dist, Philox4x32& rng);

/// With probability rate, a jump vector sigma(state) * measure column drawn
/// uniformly; nullopt otherwise. `source` receives the chosen column on a jump.
std::optional<Vector> maybe_jump(const JumpSpec& jumps, const GeometricSigma& sigma, const Vector& state,
                                 Philox4x32& rng, Index* source = nullptr);

struct StepInfo {
  bool jumped = false;
  Index jump_source = -1;
};

/// One explicit-implicit Euler step of length dt: jump first (if allowed and
/// triggered), then shift the curves by dt exactly, add drift * dt and the
/// scaled diffusion with Brownian increments of variance dt. dt = 0 reduces
/// to the jump alone.
Vector euler_step(const CalibratedModel& model, const Vector& state, double dt, Philox4x32& rng,
                  StepInfo* info = nullptr, bool allow_jump = true);

/// Simulates config.n_scenarios independent paths from the model anchor.
/// Each scenario draws its horizon stretch tau once and owns the RNG stream
/// (seed, scenario index); results are bit-identical for any thread count.
ScenarioSet simulate_scenarios(const CalibratedModel& model, const SimulationConfig& config);

/// CSV export: one row per scenario, factor columns then tau_days, n_jumps.
void save_scenarios(const ScenarioSet& set, const FactorLayout& layout, std::ostream& out,
                    const std::map<std::string, std::string>& config_echo = {});
void save_scenarios_file(const ScenarioSet& set, const FactorLayout& layout, const std::string& path,
                         const std::map<std::string, std::string>& config_echo = {});

/// Versioned JSON export (same family as the model file), including the full
/// per-scenario audit trail.
void save_scenarios_json(const ScenarioSet& set, const FactorLayout& layout, const std::string& path,
                         const std::map<std::string, std::string>& config_echo = {});

} // namespace scengen
