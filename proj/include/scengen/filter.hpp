#pragma once

#include <vector>

#include "scengen/error.hpp"
#include "scengen/types.hpp"

namespace scengen {

// Return rows are indexed the way the time series is written down: the raw
// return matrix has K-1 rows and row t corresponds to series index i = t+1
// (the return from observation i to i+1, 1-based). Sliding-window quantities
// exist for series indices i = L..K-1 and are stored with row t = i - L.

/// Trailing mean-zero realized variance per factor over a window of L returns.
struct SlidingVariance {
  Index window = 0;       // L
  Index first_index = 0;  // series index of row 0 (= L)
  Matrix values;          // (K-L) x J, row t = variance over return rows [t, t+L-1]

  Index last_index() const { return first_index + values.rows() - 1; }  // K-1
  Vector today() const { return values.row(values.rows() - 1).transpose(); }
};

/// Ratios of local volatility to today's volatility, R_i = sqrt(var_i / var_today),
/// with a symmetric variance floor applied inside both square roots.
struct VolRatioSeries {
  Index first_index = 0;
  Matrix values;  // same shape as the SlidingVariance it came from
  double variance_floor = 0.0;
};

/// Vol-rescaled returns: filtered(i, j) = raw(i, j) / R_i^j for i = L..K-1.
struct FilteredReturns {
  Index first_index = 0;
  Matrix values;  // (K-L) x J

  Index last_index() const { return first_index + values.rows() - 1; }
};

/// Indices whose filtered return breaches eta standard deviations of today's
/// volatility in at least min_violations factors.
struct ExtremeEventSet {
  double level = 4.0;          // eta
  Index min_violations = 4;    // M
  std::vector<Index> indices;  // series indices, ascending
  std::vector<std::vector<Index>> violating_factors;  // per extreme index
};

/// Split of filtered returns into the diffusive and extreme subsets.
struct ReturnPartition {
  std::vector<Index> diffusive_indices;
  Matrix diffusive;  // one row per retained (diffusive) filtered return
  std::vector<Index> extreme_indices;
  Matrix extreme;
};

SlidingVariance sliding_variance(const Matrix& returns, Index window);
VolRatioSeries vol_ratio(const SlidingVariance& sv, double variance_floor);
FilteredReturns rescale_returns(const Matrix& returns, const VolRatioSeries& ratios);
ExtremeEventSet detect_extreme_events(const FilteredReturns& filtered, const Vector& today_variance, double level,
                                      Index min_violations);
ReturnPartition partition_returns(const FilteredReturns& filtered, const ExtremeEventSet& extremes);

struct FilterConfig {
  Index l_rescale = 20;
  Index l_extreme = 40;
  double eta = 4.0;
  Index violations = 4;          // M
  double variance_floor = 1e-12; // in squared-return units
};

/// Everything the calibration needs from the filter stage. Rescaling and
/// extreme detection run on two independent windows; detection applies to the
/// returns rescaled with the l_extreme ratios, with today's variance taken
/// from the same window.
struct FilterResult {
  Matrix returns;                  // raw, (K-1) x J
  SlidingVariance variance_rescale;
  FilteredReturns filtered;        // rescaled with l_rescale; feeds calibration
  ExtremeEventSet extremes;        // detected on the l_extreme pipeline
  Vector today_variance;           // l_rescale window, per factor
};

struct HistoricalPanel;
FilterResult run_filter(const HistoricalPanel& panel, const FilterConfig& config);

} // namespace scengen
