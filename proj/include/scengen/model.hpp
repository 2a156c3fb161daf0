#pragma once

#include <map>
#include <string>
#include <vector>

#include "scengen/drift.hpp"
#include "scengen/filter.hpp"
#include "scengen/layout.hpp"
#include "scengen/panel.hpp"
#include "scengen/sigma.hpp"
#include "scengen/types.hpp"

namespace scengen {

/// Discrete distribution of the effective simulation-day length.
struct TimeChangeDistribution {
  // (duration in days, probability)
  std::vector<std::pair<double, double>> atoms{{0.9, 0.90}, {1.9, 0.10}};

  double mean() const;
  void validate() const;
  static TimeChangeDistribution trivial() { return {{{1.0, 1.0}}}; }
};

/// Extreme-event jump mixture: with probability `rate` per simulated day a
/// jump is drawn uniformly from `measure`, whose columns are the extreme
/// filtered returns pulled back through sigma at their own observation date.
struct JumpSpec {
  double rate = 0.02;
  Matrix measure;                     // J x n_extreme, sigma-space jump vectors
  std::vector<Index> source_indices;  // series index of each column
  bool rate_clamped = false;          // true if rate was forced to 0 on an empty measure
};

struct ModelConfig {
  double rate_floor = 1e-4;
  bool include_hjm = true;
  bool include_fx_drift = true;
  Vector mu2;  // empty = zero
  double jump_rate = 0.02;
  TimeChangeDistribution time_change;
};

/// Immutable bundle produced by calibration; shareable across simulation
/// workers. One Brownian driver per retained diffusive return: column i of
/// `directions` is sigma(Y_i)^-1 applied to the filtered return at i, and the
/// diffusion term is scale * sigma(state) * directions * dB.
struct CalibratedModel {
  FactorLayout layout;
  GeometricSigma sigma;
  Matrix directions;                    // J x N_d
  std::vector<Index> direction_indices; // series index of each driver
  double scale = 0.0;                   // 1 / sqrt(delta * N_d)
  double delta = 1.0 / 250.0;
  DriftSpec drift;
  Matrix fx_loadings;                   // p x N_d, row a-1 = scaled deltas of currency a
  JumpSpec jumps;
  TimeChangeDistribution time_change;
  Vector anchor_state;                  // today's observation Y_K

  Index driver_count() const { return directions.cols(); }

  /// Total drift (HJM + quanto + FX + mu2) at a state; excludes the shift
  /// semigroup, which the Euler step applies exactly.
  Vector total_drift(const Vector& state) const;
};

CalibratedModel build_calibrated_model(const HistoricalPanel& panel, const FilteredReturns& filtered,
                                       const ExtremeEventSet& extremes, const ModelConfig& config);

/// Versioned JSON export for reproducibility audits; values round-trip exactly.
void save_model(const CalibratedModel& model, const std::string& path,
                const std::map<std::string, std::string>& config_echo = {});
CalibratedModel load_model(const std::string& path);

} // namespace scengen
