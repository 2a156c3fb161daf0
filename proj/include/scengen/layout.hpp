#pragma once

#include <string>
#include <vector>

#include "scengen/error.hpp"
#include "scengen/types.hpp"

namespace scengen {

enum class FactorType { ForwardRate, LogFx };

struct FactorDesc {
  FactorType type;
  Index currency;  // index into currencies(), 0 = domestic
  double tenor;    // year-fraction time-to-maturity; meaningful for ForwardRate only
};

/// Canonical flattening of a multi-currency IR/FX risk-factor state vector.
///
/// Ordering is fixed: all forward curves first (domestic, then foreign
/// currencies in the given order, each by ascending tenor), then log-FX
/// rates in foreign-currency order. Total factor count J = (p+1)*n + p
/// for p foreign currencies and n tenors. n = 0 (log-FX only) is allowed
/// for synthetic studies.
class FactorLayout {
public:
  FactorLayout(std::vector<std::string> currencies, std::vector<double> tenor_grid)
      : currencies_(std::move(currencies)), tenors_(std::move(tenor_grid)) {
    if (currencies_.empty())
      raise(Errc::BadConfig, "layout needs at least one (domestic) currency");
    for (std::size_t i = 0; i + 1 < tenors_.size(); ++i)
      if (!(tenors_[i] < tenors_[i + 1]))
        raise(Errc::BadConfig, "tenor grid must be strictly increasing");
    if (!tenors_.empty() && tenors_.front() < 0.0)
      raise(Errc::BadConfig, "tenor grid must start at a nonnegative maturity");
    if (tenors_.empty() && currencies_.size() == 1)
      raise(Errc::BadConfig, "layout with no tenors and no foreign currency has no factors");
  }

  Index currency_count() const { return static_cast<Index>(currencies_.size()); }  // p+1
  Index foreign_count() const { return currency_count() - 1; }                     // p
  Index tenor_count() const { return static_cast<Index>(tenors_.size()); }         // n
  Index factor_count() const {                                                     // J
    return currency_count() * tenor_count() + foreign_count();
  }

  const std::vector<std::string>& currencies() const { return currencies_; }
  const std::vector<double>& tenor_grid() const { return tenors_; }

  Index curve_offset(Index ccy) const { return ccy * tenor_count(); }
  Index fx_index(Index ccy) const {
    // ccy >= 1: the log-FX factor of foreign currency ccy
    return currency_count() * tenor_count() + (ccy - 1);
  }

  FactorDesc factor(Index j) const {
    const Index n = tenor_count();
    const Index curve_block = currency_count() * n;
    if (j < curve_block) return {FactorType::ForwardRate, j / n, tenors_[static_cast<std::size_t>(j % n)]};
    return {FactorType::LogFx, j - curve_block + 1, 0.0};
  }

  /// Column names in canonical order: "<CCY>_f_<tenor>" then "<CCY>_logfx".
  std::vector<std::string> column_names() const;

  bool operator==(const FactorLayout& other) const {
    return currencies_ == other.currencies_ && tenors_ == other.tenors_;
  }

private:
  std::vector<std::string> currencies_;
  std::vector<double> tenors_;
};

/// View of one currency's forward curve inside a flat state vector.
inline Eigen::Ref<const Vector> curve_view(const Vector& state, const FactorLayout& layout, Index ccy) {
  if (state.size() != layout.factor_count())
    raise(Errc::LengthMismatch, "state length does not match layout factor count");
  return state.segment(layout.curve_offset(ccy), layout.tenor_count());
}

inline Eigen::Ref<Vector> curve_view(Vector& state, const FactorLayout& layout, Index ccy) {
  if (state.size() != layout.factor_count())
    raise(Errc::LengthMismatch, "state length does not match layout factor count");
  return state.segment(layout.curve_offset(ccy), layout.tenor_count());
}

inline double log_fx(const Vector& state, const FactorLayout& layout, Index ccy) {
  if (state.size() != layout.factor_count())
    raise(Errc::LengthMismatch, "state length does not match layout factor count");
  return state(layout.fx_index(ccy));
}

/// Formats a tenor for column names; round-trips the grid values used in practice.
std::string format_tenor(double tenor);

/// Parses a plain-text key-value layout file (currencies = ..., tenors = ...).
FactorLayout load_layout_file(const std::string& path);

} // namespace scengen
