#include "scengen/risk.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "scengen/shift.hpp"

namespace scengen {

Portfolio::Portfolio(std::vector<Instrument> instruments, bool roll_over)
    : instruments_(std::move(instruments)), roll_over_(roll_over) {
  if (instruments_.empty()) raise(Errc::BadConfig, "portfolio must hold at least one instrument");
  for (const auto& inst : instruments_) {
    if (!std::isfinite(inst.notional)) raise(Errc::NonFiniteValue, "instrument notional must be finite");
    if (inst.kind == Instrument::Kind::FxSpot && inst.currency < 1)
      raise(Errc::BadConfig, "FX spot positions must reference a foreign currency");
    if (inst.kind == Instrument::Kind::ZeroCouponBond && inst.maturity < 0.0)
      raise(Errc::BadConfig, "bond maturity must be nonnegative");
  }
}

double zcb_price(const ConstVectorRef& curve, const std::vector<double>& tenors, double x) {
  if (tenors.empty()) raise(Errc::MaturityOutOfRange, "layout has no tenor grid to price bonds on");
  if (x < 0.0 || x > tenors.back())
    raise(Errc::MaturityOutOfRange,
          "maturity " + std::to_string(x) + " outside [0, " + std::to_string(tenors.back()) + "]");
  return std::exp(-integrate_curve(curve, tenors, x));
}

double portfolio_value(const Portfolio& portfolio, const Vector& state, const FactorLayout& layout) {
  if (state.size() != layout.factor_count())
    raise(Errc::LengthMismatch, "state length does not match layout factor count");
  double value = 0.0;
  for (const auto& inst : portfolio.instruments()) {
    if (inst.currency >= layout.currency_count())
      raise(Errc::BadConfig, "instrument references a currency outside the layout");
    switch (inst.kind) {
      case Instrument::Kind::ZeroCouponBond: {
        const double price =
            zcb_price(state.segment(layout.curve_offset(inst.currency), layout.tenor_count()),
                      layout.tenor_grid(), inst.maturity);
        const double fx = inst.currency == 0 ? 1.0 : std::exp(state(layout.fx_index(inst.currency)));
        value += inst.notional * fx * price;
        break;
      }
      case Instrument::Kind::FxSpot:
        value += inst.notional * std::exp(state(layout.fx_index(inst.currency)));
        break;
    }
  }
  return value;
}

Vector scenario_pnl(const Portfolio& portfolio, const Vector& base_state, const ScenarioSet& scenarios,
                    const FactorLayout& layout) {
  const double base_value = portfolio_value(portfolio, base_state, layout);
  Vector losses(scenarios.states.rows());
  for (Index s = 0; s < scenarios.states.rows(); ++s)
    losses(s) = base_value - portfolio_value(portfolio, scenarios.states.row(s).transpose(), layout);
  return losses;
}

VarEsResult var_es(const Vector& losses, double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0)) raise(Errc::BadConfig, "confidence must lie in (0, 1)");
  const Index n = losses.size();
  if (n < 1) raise(Errc::TooFewSamples, "cannot compute VaR from an empty loss sample");

  std::vector<double> sorted(losses.data(), losses.data() + n);
  std::sort(sorted.begin(), sorted.end());
  // order statistic at rank ceil(confidence * n), 1-based
  Index rank = static_cast<Index>(std::ceil(confidence * static_cast<double>(n)));
  rank = std::clamp<Index>(rank, 1, n);

  VarEsResult result;
  result.confidence = confidence;
  result.n_samples = n;
  result.too_few_samples = static_cast<double>(n) * (1.0 - confidence) < 1.0;
  result.var = sorted[static_cast<std::size_t>(rank - 1)];
  double tail = 0.0;
  for (Index i = rank - 1; i < n; ++i) tail += sorted[static_cast<std::size_t>(i)];
  result.es = tail / static_cast<double>(n - rank + 1);
  return result;
}

BacktestReport backtest(const HistoricalPanel& panel, const Portfolio& portfolio, const BacktestConfig& config) {
  BacktestReport report;
  if (config.window_days < 0) raise(Errc::BadConfig, "backtest window must be nonnegative");
  if (config.window_days == 0) return report;
  const Index k_total = panel.observation_count();
  if (k_total < config.calibration_days + config.window_days)
    raise(Errc::InsufficientHistory, "panel has " + std::to_string(k_total) + " observations; backtest needs " +
                                         std::to_string(config.calibration_days + config.window_days));

  SimulationConfig sim = config.simulation;
  sim.horizon_steps = 1;

  for (Index k = 0; k < config.window_days; ++k) {
    const Index today = k_total - 1 - config.window_days + k;
    HistoricalPanel window{panel.layout,
                           {panel.dates.begin() + (today - config.calibration_days + 1),
                            panel.dates.begin() + today + 1},
                           panel.values.middleRows(today - config.calibration_days + 1, config.calibration_days),
                           panel.delta};

    const FilterResult filtered = run_filter(window, config.filter);
    const CalibratedModel model = build_calibrated_model(window, filtered.filtered, filtered.extremes, config.model);

    Portfolio valued = portfolio;
    if (!portfolio.roll_over()) {
      // aging portfolio: maturities shorten as the backtest advances
      std::vector<Instrument> aged = portfolio.instruments();
      for (auto& inst : aged)
        if (inst.kind == Instrument::Kind::ZeroCouponBond)
          inst.maturity = std::max(0.0, inst.maturity - static_cast<double>(k) * panel.delta);
      valued = Portfolio(std::move(aged), false);
    }

    sim.seed = config.simulation.seed + static_cast<std::uint64_t>(k);
    const ScenarioSet scenarios = simulate_scenarios(model, sim);
    const Vector losses = scenario_pnl(valued, window.last_state(), scenarios, panel.layout);
    const VarEsResult risk = var_es(losses, config.confidence);

    const Vector base = panel.values.row(today).transpose();
    const Vector next = panel.values.row(today + 1).transpose();
    const double realized =
        portfolio_value(valued, base, panel.layout) - portfolio_value(valued, next, panel.layout);

    BacktestDay day;
    day.date = panel.dates[static_cast<std::size_t>(today + 1)];
    day.realized_loss = realized;
    day.var = risk.var;
    day.es = risk.es;
    day.var_violation = realized > risk.var;
    day.es_breach = realized > risk.es;
    if (day.var_violation) ++report.var_violations;
    if (day.es_breach) ++report.es_breaches;
    report.days.push_back(std::move(day));
  }
  return report;
}

void save_backtest(const BacktestReport& report, std::ostream& out,
                   const std::map<std::string, std::string>& config_echo) {
  for (const auto& [key, value] : config_echo) out << "# " << key << " = " << value << '\n';
  out << "date,realized_loss,var,es,var_violation,es_breach\n";
  char buf[40];
  for (const auto& day : report.days) {
    out << day.date;
    std::snprintf(buf, sizeof(buf), "%.17g", day.realized_loss);
    out << ',' << buf;
    std::snprintf(buf, sizeof(buf), "%.17g", day.var);
    out << ',' << buf;
    std::snprintf(buf, sizeof(buf), "%.17g", day.es);
    out << ',' << buf;
    out << ',' << (day.var_violation ? 1 : 0) << ',' << (day.es_breach ? 1 : 0) << '\n';
  }
  out << "# total_var_violations = " << report.var_violations << '\n';
  out << "# total_es_breaches = " << report.es_breaches << '\n';
}

void save_backtest_file(const BacktestReport& report, const std::string& path,
                        const std::map<std::string, std::string>& config_echo) {
  std::ofstream out(path);
  if (!out) raise(Errc::IoError, "cannot write backtest CSV: " + path);
  save_backtest(report, out, config_echo);
}

Histogram make_histogram(const Vector& values, Index n_bins, double lo, double hi) {
  if (n_bins < 1) raise(Errc::BadConfig, "histogram needs at least one bin");
  if (!(lo < hi)) raise(Errc::BadConfig, "histogram range must be nonempty");
  Histogram hist;
  hist.edges.resize(n_bins + 1);
  for (Index b = 0; b <= n_bins; ++b)
    hist.edges(b) = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(n_bins);
  hist.counts.assign(static_cast<std::size_t>(n_bins), 0);
  const double width = (hi - lo) / static_cast<double>(n_bins);
  for (Index i = 0; i < values.size(); ++i) {
    Index b = static_cast<Index>(std::floor((values(i) - lo) / width));
    b = std::clamp<Index>(b, 0, n_bins - 1);
    ++hist.counts[static_cast<std::size_t>(b)];
  }
  return hist;
}

Histogram make_histogram(const Vector& values, Index n_bins) {
  if (values.size() == 0) raise(Errc::TooFewSamples, "cannot histogram an empty sample");
  double lo = values.minCoeff();
  double hi = values.maxCoeff();
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  return make_histogram(values, n_bins, lo, hi);
}

void histogram_export(const Vector& values, Index n_bins, const std::string& path) {
  const Histogram hist = make_histogram(values, n_bins);
  std::ofstream out(path);
  if (!out) raise(Errc::IoError, "cannot write histogram CSV: " + path);
  out << "bin_left,bin_right,count\n";
  char buf[40];
  for (std::size_t b = 0; b < hist.counts.size(); ++b) {
    std::snprintf(buf, sizeof(buf), "%.17g", hist.edges(static_cast<Index>(b)));
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", hist.edges(static_cast<Index>(b) + 1));
    out << buf << ',' << hist.counts[b] << '\n';
  }
}

Portfolio load_portfolio_file(const std::string& path, const FactorLayout& layout) {
  std::ifstream in(path);
  if (!in) raise(Errc::IoError, "cannot open portfolio file: " + path);
  auto currency_index = [&](const std::string& ccy) -> Index {
    const auto& list = layout.currencies();
    for (std::size_t c = 0; c < list.size(); ++c)
      if (list[c] == ccy) return static_cast<Index>(c);
    raise(Errc::BadConfig, "portfolio references unknown currency: " + ccy);
  };
  std::vector<Instrument> instruments;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream fields(line);
    std::string kind;
    if (!(fields >> kind)) continue;
    Instrument inst;
    std::string ccy;
    if (kind == "zcb") {
      inst.kind = Instrument::Kind::ZeroCouponBond;
      if (!(fields >> ccy >> inst.maturity >> inst.notional))
        raise(Errc::BadConfig, "portfolio line " + std::to_string(line_no) + ": expected `zcb CCY maturity notional`");
    } else if (kind == "fx") {
      inst.kind = Instrument::Kind::FxSpot;
      if (!(fields >> ccy >> inst.notional))
        raise(Errc::BadConfig, "portfolio line " + std::to_string(line_no) + ": expected `fx CCY notional`");
    } else {
      raise(Errc::BadConfig, "portfolio line " + std::to_string(line_no) + ": unknown instrument kind " + kind);
    }
    inst.currency = currency_index(ccy);
    instruments.push_back(inst);
  }
  return Portfolio(std::move(instruments));
}

} // namespace scengen
