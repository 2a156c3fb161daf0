#include <doctest.h>

#include <sstream>

#include "scengen/panel.hpp"
#include "scengen/rng.hpp"

using namespace scengen;

namespace {

FactorLayout two_factor_layout() { return FactorLayout({"EUR"}, {0.5, 2.0}); }

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return Errc::IoError;
}

} // namespace

TEST_CASE("layout invariants") {
  FactorLayout layout({"EUR", "USD", "GBP"}, {0.0, 1.0, 5.0, 10.0});
  CHECK(layout.factor_count() == 3 * 4 + 2);  // (p+1)n + p
  CHECK(layout.factor(0).type == FactorType::ForwardRate);
  CHECK(layout.factor(0).currency == 0);
  CHECK(layout.factor(11).currency == 2);
  CHECK(layout.factor(12).type == FactorType::LogFx);
  CHECK(layout.factor(12).currency == 1);
  CHECK(layout.fx_index(1) == 12);

  CHECK_THROWS_AS(FactorLayout({"EUR"}, {1.0, 1.0}), Error);   // not strictly increasing
  CHECK_THROWS_AS(FactorLayout({"EUR"}, {-0.5, 1.0}), Error);  // negative first tenor
  CHECK_THROWS_AS(FactorLayout({}, {1.0}), Error);
}

TEST_CASE("column names round the layout ordering") {
  FactorLayout layout({"EUR", "USD"}, {0.25, 1.0});
  const auto names = layout.column_names();
  REQUIRE(names.size() == 5);
  CHECK(names[0] == "EUR_f_0.25");
  CHECK(names[1] == "EUR_f_1");
  CHECK(names[2] == "USD_f_0.25");
  CHECK(names[3] == "USD_f_1");
  CHECK(names[4] == "USD_logfx");
}

TEST_CASE("load_panel basic shape") {
  std::istringstream csv("date,EUR_f_0.5,EUR_f_2\n"
                         "2020-01-01,0.01,0.02\n"
                         "2020-01-02,0.011,0.021\n"
                         "2020-01-03,0.012,0.019\n");
  const HistoricalPanel panel = load_panel(csv, two_factor_layout());
  CHECK(panel.observation_count() == 3);
  CHECK(panel.values.cols() == 2);
  CHECK(panel.values(2, 1) == 0.019);
  CHECK(panel.dates[0] == "2020-01-01");
}

TEST_CASE("load_panel rejects bad input") {
  SUBCASE("date out of order") {
    std::istringstream csv("date,EUR_f_0.5,EUR_f_2\n"
                           "2020-01-02,0.01,0.02\n"
                           "2020-01-01,0.01,0.02\n");
    CHECK(code_of([&] { load_panel(csv, two_factor_layout()); }) == Errc::NonMonotoneDates);
  }
  SUBCASE("empty cell names row and column") {
    std::istringstream csv("date,EUR_f_0.5,EUR_f_2\n"
                           "2020-01-01,0.01,0.02\n"
                           "2020-01-02,,0.02\n");
    try {
      load_panel(csv, two_factor_layout());
      FAIL("expected MissingCell");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::MissingCell);
      CHECK(std::string(e.what()).find("row 3") != std::string::npos);
      CHECK(std::string(e.what()).find("EUR_f_0.5") != std::string::npos);
    }
  }
  SUBCASE("unknown column") {
    std::istringstream csv("date,EUR_f_0.5,EUR_f_2,GBP_logfx\n2020-01-01,0.01,0.02,1.0\n");
    CHECK(code_of([&] { load_panel(csv, two_factor_layout()); }) == Errc::UnknownColumn);
  }
  SUBCASE("missing column") {
    std::istringstream csv("date,EUR_f_0.5\n2020-01-01,0.01\n");
    CHECK(code_of([&] { load_panel(csv, two_factor_layout()); }) == Errc::MissingCell);
  }
  SUBCASE("unparseable and non-finite values") {
    std::istringstream csv("date,EUR_f_0.5,EUR_f_2\n2020-01-01,abc,0.02\n");
    CHECK(code_of([&] { load_panel(csv, two_factor_layout()); }) == Errc::NonFiniteValue);
    std::istringstream csv2("date,EUR_f_0.5,EUR_f_2\n2020-01-01,inf,0.02\n");
    CHECK(code_of([&] { load_panel(csv2, two_factor_layout()); }) == Errc::NonFiniteValue);
  }
  SUBCASE("empty file") {
    std::istringstream csv("");
    CHECK(code_of([&] { load_panel(csv, two_factor_layout()); }) == Errc::EmptyPanel);
  }
}

TEST_CASE("panel CSV round-trip is bit-identical") {
  const FactorLayout layout({"EUR", "USD"}, {0.25, 1.0});
  HistoricalPanel panel{layout, {}, Matrix(40, layout.factor_count()), 1.0 / 250.0};
  Philox4x32 rng(3, 0);
  for (Index i = 0; i < panel.values.rows(); ++i) {
    panel.dates.push_back("2020-01-" + std::to_string(10 + i));
    for (Index j = 0; j < panel.values.cols(); ++j)
      panel.values(i, j) = (rng.uniform01() - 0.5) * std::pow(10.0, -3.0 + 6.0 * rng.uniform01());
  }
  std::ostringstream out;
  save_panel(panel, out);
  std::istringstream in(out.str());
  const HistoricalPanel reloaded = load_panel(in, layout);
  REQUIRE(reloaded.values.rows() == panel.values.rows());
  for (Index i = 0; i < panel.values.rows(); ++i)
    for (Index j = 0; j < panel.values.cols(); ++j)
      CHECK(reloaded.values(i, j) == panel.values(i, j));  // exact
  CHECK(reloaded.dates == panel.dates);
}

TEST_CASE("compute_returns") {
  FactorLayout layout({"EUR"}, {0.5, 2.0});
  HistoricalPanel panel{layout, {"d1", "d2"}, Matrix(2, 2), 1.0 / 250.0};
  panel.values << 1.0, 2.0, 3.0, 5.0;
  const Matrix returns = compute_returns(panel);
  REQUIRE(returns.rows() == 1);  // K = 2 forces exactly one return row
  CHECK(returns(0, 0) == 2.0);
  CHECK(returns(0, 1) == 3.0);

  SUBCASE("constant panel gives zero returns") {
    panel.values << 4.0, 7.0, 4.0, 7.0;
    CHECK(compute_returns(panel).isZero(0.0));
  }
  SUBCASE("telescoping sum") {
    HistoricalPanel longer{layout, {}, Matrix(30, 2), 1.0 / 250.0};
    Philox4x32 rng(9, 1);
    for (Index i = 0; i < 30; ++i) {
      longer.dates.push_back("d" + std::to_string(100 + i));
      for (Index j = 0; j < 2; ++j) longer.values(i, j) = rng.gaussian();
    }
    const Vector summed = compute_returns(longer).colwise().sum().transpose();
    const Vector span = (longer.values.row(29) - longer.values.row(0)).transpose();
    CHECK((summed - span).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("slice_state views") {
  SUBCASE("p=1, n=2") {
    FactorLayout layout({"EUR", "USD"}, {0.5, 2.0});
    Vector state(5);
    state << 1, 2, 3, 4, 5;
    CHECK(curve_view(state, layout, 0)(0) == 1);
    CHECK(curve_view(state, layout, 0)(1) == 2);
    CHECK(curve_view(state, layout, 1)(0) == 3);
    CHECK(curve_view(state, layout, 1)(1) == 4);
    CHECK(log_fx(state, layout, 1) == 5);
    // views concatenated in layout order reproduce the state
    Vector rebuilt(5);
    rebuilt << curve_view(state, layout, 0), curve_view(state, layout, 1), log_fx(state, layout, 1);
    CHECK(rebuilt == state);
  }
  SUBCASE("p=0, n=3") {
    FactorLayout layout({"EUR"}, {0.0, 1.0, 5.0});
    Vector state(3);
    state << 7, 8, 9;
    CHECK(curve_view(state, layout, 0).size() == 3);
    CHECK(layout.foreign_count() == 0);
  }
  SUBCASE("wrong length") {
    FactorLayout layout({"EUR"}, {0.0, 1.0, 5.0});
    Vector state(2);
    CHECK_THROWS_AS((void)curve_view(state, layout, 0), Error);
  }
}
