#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "scengen/oracle.hpp"
#include "scengen/risk.hpp"
#include "scengen/rng.hpp"

using namespace scengen;

TEST_CASE("zcb_price") {
  const std::vector<double> tenors{0.0, 1.0, 3.0};
  const Vector zero = Vector::Zero(3);
  CHECK(zcb_price(zero, tenors, 0.0) == 1.0);
  CHECK(zcb_price(zero, tenors, 2.5) == 1.0);

  const Vector flat = Vector::Constant(3, 0.05);
  CHECK(zcb_price(flat, tenors, 2.0) == doctest::Approx(std::exp(-0.10)).epsilon(1e-12));
  CHECK(zcb_price(flat, tenors, 0.0) == 1.0);

  CHECK_THROWS_AS(zcb_price(flat, tenors, 3.5), Error);
  CHECK_THROWS_AS(zcb_price(flat, tenors, -0.1), Error);
}

TEST_CASE("portfolio_value") {
  FactorLayout layout({"EUR", "USD"}, {0.0, 1.0, 3.0});
  Vector state = Vector::Zero(layout.factor_count());

  SUBCASE("domestic bond on a zero curve") {
    Portfolio portfolio({{Instrument::Kind::ZeroCouponBond, 0, 2.0, 100.0}});
    CHECK(portfolio_value(portfolio, state, layout) == doctest::Approx(100.0));
  }
  SUBCASE("fx position at log-spot zero") {
    Portfolio portfolio({{Instrument::Kind::FxSpot, 1, 0.0, 1.0}});
    CHECK(portfolio_value(portfolio, state, layout) == doctest::Approx(1.0));
  }
  SUBCASE("foreign bond converts at exp(log-fx)") {
    curve_view(state, layout, 1).setConstant(0.05);
    state(layout.fx_index(1)) = std::log(2.0);
    Portfolio portfolio({{Instrument::Kind::ZeroCouponBond, 1, 2.0, 1.0}});
    CHECK(portfolio_value(portfolio, state, layout) == doctest::Approx(2.0 * std::exp(-0.10)).epsilon(1e-12));
  }
  SUBCASE("value is linear in notionals") {
    Philox4x32 rng(20, 0);
    for (Index j = 0; j < state.size(); ++j) state(j) = 0.02 + 0.01 * rng.gaussian();
    Portfolio a({{Instrument::Kind::ZeroCouponBond, 0, 1.5, 10.0}});
    Portfolio b({{Instrument::Kind::FxSpot, 1, 0.0, -3.0}});
    Portfolio sum({{Instrument::Kind::ZeroCouponBond, 0, 1.5, 20.0}, {Instrument::Kind::FxSpot, 1, 0.0, -6.0}});
    const double va = portfolio_value(a, state, layout);
    const double vb = portfolio_value(b, state, layout);
    CHECK(portfolio_value(sum, state, layout) == doctest::Approx(2.0 * (va + vb)).epsilon(1e-12));
  }
  SUBCASE("empty portfolio rejected at construction") {
    CHECK_THROWS_AS(Portfolio({}), Error);
  }
  SUBCASE("fx position must be foreign") {
    CHECK_THROWS_AS(Portfolio({{Instrument::Kind::FxSpot, 0, 0.0, 1.0}}), Error);
  }
}

TEST_CASE("scenario_pnl") {
  FactorLayout layout({"EUR", "USD"}, {});
  Vector base = Vector::Constant(1, 0.3);
  Portfolio portfolio({{Instrument::Kind::FxSpot, 1, 0.0, 1.0}});

  ScenarioSet set;
  set.states = Matrix(2, 1);
  set.states(0, 0) = 0.3;                  // unchanged
  set.states(1, 0) = 0.3 + std::log(1.01); // spot up 1%
  set.audit.resize(2);

  const Vector losses = scenario_pnl(portfolio, base, set, layout);
  CHECK(losses(0) == doctest::Approx(0.0));
  CHECK(losses(1) == doctest::Approx(-0.01 * std::exp(0.3)).epsilon(1e-12));
}

TEST_CASE("var_es order statistics") {
  Vector losses(100);
  for (Index i = 0; i < 100; ++i) losses(i) = static_cast<double>(i + 1);

  const VarEsResult at_99 = var_es(losses, 0.99);
  CHECK(at_99.var == 99.0);
  CHECK(at_99.es == doctest::Approx(99.5));  // mean of {99, 100}

  const VarEsResult at_95 = var_es(losses, 0.95);
  CHECK(at_95.var == 95.0);
  CHECK(at_95.es == doctest::Approx(97.5));  // mean of {95..100}

  SUBCASE("degenerate sample") {
    const VarEsResult flat = var_es(Vector::Constant(50, 3.25), 0.99);
    CHECK(flat.var == 3.25);
    CHECK(flat.es == 3.25);
    CHECK(flat.too_few_samples);  // 50 < 1 / 0.01
  }
  SUBCASE("es dominates var on random samples") {
    Philox4x32 rng(21, 0);
    for (int rep = 0; rep < 20; ++rep) {
      Vector sample(200);
      for (Index i = 0; i < 200; ++i) sample(i) = rng.gaussian() + 0.5 * rng.uniform01();
      for (double conf : {0.9, 0.95, 0.99}) {
        const VarEsResult r = var_es(sample, conf);
        CHECK(r.es >= r.var);
      }
    }
  }
  SUBCASE("affine equivariance") {
    Philox4x32 rng(22, 0);
    Vector sample(300);
    for (Index i = 0; i < 300; ++i) sample(i) = rng.gaussian();
    const VarEsResult base = var_es(sample, 0.95);
    const VarEsResult moved = var_es((2.5 * sample.array() + 7.0).matrix(), 0.95);
    CHECK(moved.var == doctest::Approx(2.5 * base.var + 7.0).epsilon(1e-12));
    CHECK(moved.es == doctest::Approx(2.5 * base.es + 7.0).epsilon(1e-12));
  }
  SUBCASE("input validation") {
    CHECK_THROWS_AS(var_es(Vector(), 0.99), Error);
    CHECK_THROWS_AS(var_es(losses, 1.0), Error);
    CHECK_THROWS_AS(var_es(losses, 0.0), Error);
  }
}

namespace {

HistoricalPanel coverage_panel(Index k, std::uint64_t seed) {
  FactorLayout layout({"EUR", "USD"}, {});
  oracle::ConstantDirectionSpec cd;
  cd.initial = Vector::Zero(1);
  cd.lambdas = Matrix::Constant(1, 1, 0.1);
  cd.with_drift = false;
  return oracle::generate_synthetic_panel(oracle::SyntheticSpec{layout, k, 1.0 / 250.0, seed, cd});
}

} // namespace

TEST_CASE("backtest") {
  const Portfolio portfolio({{Instrument::Kind::FxSpot, 1, 0.0, 100.0}});
  BacktestConfig config;
  config.window_days = 10;
  config.calibration_days = 60;
  config.filter.l_rescale = 10;
  config.filter.l_extreme = 15;
  config.model.jump_rate = 0.0;
  config.model.time_change = TimeChangeDistribution::trivial();
  config.simulation.n_scenarios = 500;
  config.simulation.seed = 77;

  SUBCASE("window zero yields an empty report") {
    BacktestConfig empty = config;
    empty.window_days = 0;
    const BacktestReport report = backtest(coverage_panel(80, 1), portfolio, empty);
    CHECK(report.days.empty());
  }
  SUBCASE("insufficient history is rejected") {
    CHECK_THROWS_AS(backtest(coverage_panel(60, 2), portfolio, config), Error);
  }
  SUBCASE("flags are consistent and ES dominates VaR") {
    const BacktestReport report = backtest(coverage_panel(75, 3), portfolio, config);
    REQUIRE(report.days.size() == 10);
    Index violations = 0;
    for (const auto& day : report.days) {
      CHECK(day.es >= day.var);
      CHECK(day.var_violation == (day.realized_loss > day.var));
      CHECK(day.es_breach == (day.realized_loss > day.es));
      violations += day.var_violation;
    }
    CHECK(report.var_violations == violations);
  }
  SUBCASE("aging portfolio shortens bond maturities as the window advances") {
    FactorLayout layout({"EUR"}, {0.0, 1.0});
    oracle::ConstantDirectionSpec cd;
    cd.initial = Vector::Constant(2, 0.03);
    cd.lambdas = Matrix::Constant(2, 1, 0.02);
    cd.sqrt_vol_on_rates = true;
    const HistoricalPanel panel =
        oracle::generate_synthetic_panel(oracle::SyntheticSpec{layout, 75, 1.0 / 250.0, 4, cd});
    const Portfolio aging({{Instrument::Kind::ZeroCouponBond, 0, 0.8, 100.0}}, /*roll_over=*/false);
    const BacktestReport report = backtest(panel, aging, config);
    CHECK(report.days.size() == 10);
  }
}

TEST_CASE("histograms") {
  SUBCASE("single bin catches everything") {
    Vector v(10);
    for (Index i = 0; i < 10; ++i) v(i) = 0.1 * static_cast<double>(i);
    const Histogram h = make_histogram(v, 1);
    REQUIRE(h.counts.size() == 1);
    CHECK(h.counts[0] == 10);
  }
  SUBCASE("counts sum to the sample size") {
    Philox4x32 rng(23, 0);
    Vector v(1234);
    for (Index i = 0; i < v.size(); ++i) v(i) = rng.gaussian();
    const Histogram h = make_histogram(v, 17);
    Index total = 0;
    for (Index c : h.counts) total += c;
    CHECK(total == 1234);
  }
  SUBCASE("symmetric data fills symmetric bins") {
    Vector v(8);  // interior points so no value sits on a bin edge
    v << -1.7, -1.5, -0.5, -0.3, 0.3, 0.5, 1.5, 1.7;
    const Histogram h = make_histogram(v, 4, -2.0, 2.0);
    CHECK(h.counts[0] == h.counts[3]);
    CHECK(h.counts[1] == h.counts[2]);
  }
  SUBCASE("export writes a readable table") {
    const std::string path = (std::filesystem::temp_directory_path() / "scengen_hist_test.csv").string();
    Vector v(10);
    for (Index i = 0; i < 10; ++i) v(i) = static_cast<double>(i);
    histogram_export(v, 2, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "bin_left,bin_right,count");
    int rows = 0;
    while (std::getline(in, line))
      if (!line.empty()) ++rows;
    CHECK(rows == 2);
    std::filesystem::remove(path);
  }
  SUBCASE("io failure reported") {
    CHECK_THROWS_AS(histogram_export(Vector::Ones(3), 2, "/nonexistent-dir/h.csv"), Error);
  }
}

TEST_CASE("portfolio file parsing") {
  FactorLayout layout({"EUR", "USD"}, {0.0, 2.0});
  const std::string path = (std::filesystem::temp_directory_path() / "scengen_portfolio_test.txt").string();
  {
    std::ofstream out(path);
    out << "# demo portfolio\n"
        << "zcb EUR 1.5 100.0\n"
        << "zcb USD 2.0 -25\n"
        << "fx USD 10 # hedge\n";
  }
  const Portfolio portfolio = load_portfolio_file(path, layout);
  REQUIRE(portfolio.instruments().size() == 3);
  CHECK(portfolio.instruments()[0].currency == 0);
  CHECK(portfolio.instruments()[1].notional == -25.0);
  CHECK(portfolio.instruments()[2].kind == Instrument::Kind::FxSpot);

  {
    std::ofstream out(path);
    out << "zcb GBP 1.0 5\n";
  }
  CHECK_THROWS_AS(load_portfolio_file(path, layout), Error);  // unknown currency
  {
    std::ofstream out(path);
    out << "swap EUR 1.0 5\n";
  }
  CHECK_THROWS_AS(load_portfolio_file(path, layout), Error);  // unknown kind
  std::filesystem::remove(path);
}
