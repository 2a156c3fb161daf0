#include "scengen/filter.hpp"

#include <algorithm>
#include <cmath>

#include "scengen/panel.hpp"

namespace scengen {

SlidingVariance sliding_variance(const Matrix& returns, Index window) {
  const Index n_returns = returns.rows();
  if (window < 1) raise(Errc::BadConfig, "variance window must be positive");
  if (window > n_returns)
    raise(Errc::WindowTooLong, "window " + std::to_string(window) + " exceeds return count " +
                                   std::to_string(n_returns));
  SlidingVariance sv;
  sv.window = window;
  sv.first_index = window;
  sv.values.resize(n_returns - window + 1, returns.cols());
  const Matrix squared = returns.array().square();
  // rolling sum over the window, updated incrementally
  Vector acc = squared.topRows(window).colwise().sum().transpose();
  sv.values.row(0) = acc.transpose() / static_cast<double>(window);
  for (Index t = 1; t < sv.values.rows(); ++t) {
    acc += (squared.row(t + window - 1) - squared.row(t - 1)).transpose();
    sv.values.row(t) = acc.transpose() / static_cast<double>(window);
  }
  // incremental update can drift a hair below zero on cancellations
  sv.values = sv.values.cwiseMax(0.0);
  return sv;
}

VolRatioSeries vol_ratio(const SlidingVariance& sv, double variance_floor) {
  VolRatioSeries ratios;
  ratios.first_index = sv.first_index;
  ratios.variance_floor = variance_floor;
  const Vector today = sv.today().cwiseMax(variance_floor);
  ratios.values = (sv.values.cwiseMax(variance_floor).array().rowwise() / today.transpose().array()).sqrt();
  return ratios;
}

FilteredReturns rescale_returns(const Matrix& returns, const VolRatioSeries& ratios) {
  const Index rows = ratios.values.rows();
  const Index first = ratios.first_index;
  if (first < 1 || first - 1 + rows > returns.rows() || returns.cols() != ratios.values.cols())
    raise(Errc::IndexMismatch, "ratio series does not align with the return matrix");
  FilteredReturns filtered;
  filtered.first_index = first;
  // ratio at index i rescales the return ending at i, i.e. raw row i-1
  filtered.values = returns.middleRows(first - 1, rows).array() / ratios.values.array();
  return filtered;
}

ExtremeEventSet detect_extreme_events(const FilteredReturns& filtered, const Vector& today_variance, double level,
                                      Index min_violations) {
  if (!(level > 0.0)) raise(Errc::BadConfig, "extreme-event level eta must be positive");
  if (min_violations < 1) raise(Errc::BadConfig, "extreme-event violation count M must be >= 1");
  const Vector threshold = level * today_variance.cwiseMax(0.0).cwiseSqrt();
  ExtremeEventSet set;
  set.level = level;
  set.min_violations = min_violations;
  for (Index t = 0; t < filtered.values.rows(); ++t) {
    std::vector<Index> violators;
    for (Index j = 0; j < filtered.values.cols(); ++j) {
      // an exactly-zero move never violates; otherwise a dead factor
      // (zero today-variance) would flag every single day
      const double move = std::abs(filtered.values(t, j));
      if (move > 0.0 && move >= threshold(j)) violators.push_back(j);
    }
    if (static_cast<Index>(violators.size()) >= min_violations) {
      set.indices.push_back(filtered.first_index + t);
      set.violating_factors.push_back(std::move(violators));
    }
  }
  return set;
}

ReturnPartition partition_returns(const FilteredReturns& filtered, const ExtremeEventSet& extremes) {
  const Index first = filtered.first_index;
  const Index last = filtered.last_index();
  for (Index i : extremes.indices)
    if (i < first || i > last)
      raise(Errc::IndexMismatch, "extreme index " + std::to_string(i) + " outside filtered range [" +
                                     std::to_string(first) + ", " + std::to_string(last) + "]");
  std::vector<bool> is_extreme(static_cast<std::size_t>(filtered.values.rows()), false);
  Index n_extreme = 0;
  for (Index i : extremes.indices) {
    const std::size_t offset = static_cast<std::size_t>(i - first);
    if (!is_extreme[offset]) ++n_extreme;  // tolerate duplicate indices in hand-built sets
    is_extreme[offset] = true;
  }

  ReturnPartition part;
  const Index n_diffusive = filtered.values.rows() - n_extreme;
  if (n_diffusive == 0)
    raise(Errc::AllReturnsExtreme, "every filtered return is classified extreme; nothing left to calibrate");
  part.diffusive.resize(n_diffusive, filtered.values.cols());
  part.extreme.resize(n_extreme, filtered.values.cols());
  Index d = 0, e = 0;
  for (Index t = 0; t < filtered.values.rows(); ++t) {
    if (is_extreme[static_cast<std::size_t>(t)]) {
      part.extreme.row(e) = filtered.values.row(t);
      part.extreme_indices.push_back(first + t);
      ++e;
    } else {
      part.diffusive.row(d) = filtered.values.row(t);
      part.diffusive_indices.push_back(first + t);
      ++d;
    }
  }
  return part;
}

FilterResult run_filter(const HistoricalPanel& panel, const FilterConfig& config) {
  const Index k = panel.observation_count();
  const Index l_max = std::max(config.l_rescale, config.l_extreme);
  if (k < l_max + 2)
    raise(Errc::WindowTooLong, "panel has " + std::to_string(k) + " observations; need at least " +
                                   std::to_string(l_max + 2) + " for window " + std::to_string(l_max));
  FilterResult result;
  result.returns = compute_returns(panel);

  result.variance_rescale = sliding_variance(result.returns, config.l_rescale);
  result.today_variance = result.variance_rescale.today();
  const VolRatioSeries ratios = vol_ratio(result.variance_rescale, config.variance_floor);
  result.filtered = rescale_returns(result.returns, ratios);

  const SlidingVariance sv_extreme = sliding_variance(result.returns, config.l_extreme);
  const VolRatioSeries ratios_extreme = vol_ratio(sv_extreme, config.variance_floor);
  const FilteredReturns filtered_extreme = rescale_returns(result.returns, ratios_extreme);
  result.extremes = detect_extreme_events(filtered_extreme, sv_extreme.today(), config.eta, config.violations);
  return result;
}

} // namespace scengen
