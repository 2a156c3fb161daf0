#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "scengen/layout.hpp"
#include "scengen/types.hpp"

namespace scengen {

/// K dated observations of J risk factors. Rates are instantaneous forward
/// rates on the tenor grid (Musiela parametrization), FX entries are natural
/// logs of spot. Immutable once loaded; safe for concurrent reads.
struct HistoricalPanel {
  FactorLayout layout;
  std::vector<std::string> dates;  // ISO-8601, strictly increasing
  Matrix values;                   // K x J
  double delta = 1.0 / 250.0;      // time tick in year-fractions

  Index observation_count() const { return values.rows(); }  // K
  Vector last_state() const { return values.row(values.rows() - 1).transpose(); }
};

/// Loads a panel from CSV. Header must be `date` followed by the layout's
/// column names (any order); one row per date, dates ascending, no gaps.
HistoricalPanel load_panel(std::istream& in, const FactorLayout& layout, double delta = 1.0 / 250.0);
HistoricalPanel load_panel_file(const std::string& path, const FactorLayout& layout, double delta = 1.0 / 250.0);

/// Writes a panel as CSV with full double precision (reload is bit-identical).
void save_panel(const HistoricalPanel& panel, std::ostream& out);
void save_panel_file(const HistoricalPanel& panel, const std::string& path);

/// Observed returns: row i = values.row(i+1) - values.row(i), (K-1) x J.
Matrix compute_returns(const HistoricalPanel& panel);

} // namespace scengen
