#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "scengen/engine.hpp"
#include "scengen/filter.hpp"
#include "scengen/layout.hpp"
#include "scengen/model.hpp"
#include "scengen/panel.hpp"
#include "scengen/types.hpp"

namespace scengen {

struct Instrument {
  enum class Kind { ZeroCouponBond, FxSpot };
  Kind kind = Kind::ZeroCouponBond;
  Index currency = 0;     // 0 = domestic; FxSpot requires >= 1
  double maturity = 0.0;  // time-to-maturity x in year-fractions (ZCB only)
  double notional = 0.0;  // FxSpot notional is in foreign units
};

/// Linear portfolio valued in domestic currency. Roll-over portfolios keep
/// their times-to-maturity constant across backtest days.
class Portfolio {
public:
  explicit Portfolio(std::vector<Instrument> instruments, bool roll_over = true);

  const std::vector<Instrument>& instruments() const { return instruments_; }
  bool roll_over() const { return roll_over_; }

private:
  std::vector<Instrument> instruments_;
  bool roll_over_ = true;
};

/// Zero-coupon bond price exp(-integral of the forward curve from 0 to x).
double zcb_price(const ConstVectorRef& curve, const std::vector<double>& tenors, double x);

/// Domestic-currency value; foreign legs convert at exp(log-FX).
double portfolio_value(const Portfolio& portfolio, const Vector& state, const FactorLayout& layout);

/// Loss vector, positive = loss: value(base) - value(scenario).
Vector scenario_pnl(const Portfolio& portfolio, const Vector& base_state, const ScenarioSet& scenarios,
                    const FactorLayout& layout);

struct VarEsResult {
  double confidence = 0.99;
  double var = 0.0;  // loss quantile (order statistic at rank ceil(confidence * n))
  double es = 0.0;   // mean loss at ranks from the VaR rank up
  Index n_samples = 0;
  bool too_few_samples = false;  // fewer than 1 / (1 - confidence) samples
};

VarEsResult var_es(const Vector& losses, double confidence);

struct BacktestDay {
  std::string date;
  double realized_loss = 0.0;  // positive = loss, valued with constant maturities
  double var = 0.0;
  double es = 0.0;
  bool var_violation = false;
  bool es_breach = false;
};

struct BacktestReport {
  std::vector<BacktestDay> days;
  Index var_violations = 0;
  Index es_breaches = 0;
};

struct BacktestConfig {
  Index window_days = 250;
  Index calibration_days = 500;  // trailing observations used each day
  double confidence = 0.99;
  FilterConfig filter;
  ModelConfig model;
  SimulationConfig simulation;  // horizon is forced to one day; seed offsets by day
};

/// Rolling daily backtest: recalibrate on the trailing window, simulate one
/// day ahead, compare VaR/ES against the realized next-day loss.
BacktestReport backtest(const HistoricalPanel& panel, const Portfolio& portfolio, const BacktestConfig& config);

void save_backtest(const BacktestReport& report, std::ostream& out,
                   const std::map<std::string, std::string>& config_echo = {});
void save_backtest_file(const BacktestReport& report, const std::string& path,
                        const std::map<std::string, std::string>& config_echo = {});

struct Histogram {
  Vector edges;                // n_bins + 1 ascending edges
  std::vector<Index> counts;   // n_bins entries; clamped at the ends so they sum to n
};

Histogram make_histogram(const Vector& values, Index n_bins);
Histogram make_histogram(const Vector& values, Index n_bins, double lo, double hi);

/// Plot-ready CSV of bin edges and counts.
void histogram_export(const Vector& values, Index n_bins, const std::string& path);

/// Portfolio file: one instrument per line, `zcb CCY maturity notional` or
/// `fx CCY notional`; # starts a comment.
Portfolio load_portfolio_file(const std::string& path, const FactorLayout& layout);

} // namespace scengen
