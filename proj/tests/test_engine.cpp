#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "scengen/engine.hpp"
#include "scengen/oracle.hpp"

using namespace scengen;

namespace {

/// Minimal single-FX model (J = 1, identity sigma) assembled by hand.
CalibratedModel tiny_fx_model(double direction, double scale, double jump_rate = 0.0, double jump_size = 0.0) {
  FactorLayout layout({"EUR", "USD"}, {});
  CalibratedModel model{layout,
                        GeometricSigma(layout),
                        Matrix::Constant(1, 1, direction),
                        {1},
                        scale,
                        1.0 / 250.0,
                        {},
                        Matrix::Zero(1, 1),
                        {},
                        TimeChangeDistribution::trivial(),
                        Vector::Zero(1)};
  model.drift.include_hjm = false;
  model.drift.include_fx_drift = false;
  model.fx_loadings = scale * model.directions.row(0);
  model.jumps.rate = jump_rate;
  model.jumps.measure = jump_rate > 0.0 ? Matrix::Constant(1, 1, jump_size) : Matrix(1, 0);
  model.jumps.source_indices = jump_rate > 0.0 ? std::vector<Index>{1} : std::vector<Index>{};
  return model;
}

} // namespace

TEST_CASE("sample_time_change") {
  SUBCASE("degenerate distribution always returns its atom") {
    Philox4x32 rng(1, 1);
    const TimeChangeDistribution dist = TimeChangeDistribution::trivial();
    for (int i = 0; i < 100; ++i) CHECK(sample_time_change(dist, rng) == 1.0);
  }
  SUBCASE("default atoms have mean one day") {
    const TimeChangeDistribution dist;
    CHECK(dist.mean() == doctest::Approx(1.0));  // 0.9 * 0.9 + 1.9 * 0.1
    Philox4x32 rng(2, 0);
    const int n = 100000;
    double sum = 0.0;
    int short_days = 0;
    for (int i = 0; i < n; ++i) {
      const double tau = sample_time_change(dist, rng);
      REQUIRE((tau == 0.9 || tau == 1.9));
      sum += tau;
      short_days += tau == 0.9;
    }
    const double mean = sum / n;
    CHECK(std::abs(mean - 1.0) < 3.0 * 0.3 / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(short_days / static_cast<double>(n) - 0.9) < 3.0 * std::sqrt(0.09 / n));
  }
  SUBCASE("invalid distributions rejected") {
    Philox4x32 rng(3, 0);
    TimeChangeDistribution bad{{{0.9, 0.5}, {1.9, 0.4}}};  // probabilities sum to 0.9
    CHECK_THROWS_AS(sample_time_change(bad, rng), Error);
  }
}

TEST_CASE("maybe_jump") {
  FactorLayout layout({"EUR", "USD"}, {});
  GeometricSigma sigma(layout);
  const Vector state = Vector::Zero(1);

  SUBCASE("rate zero never jumps") {
    JumpSpec spec;
    spec.rate = 0.0;
    spec.measure = Matrix(1, 0);
    Philox4x32 rng(4, 0);
    for (int i = 0; i < 1000; ++i) CHECK(!maybe_jump(spec, sigma, state, rng));
  }
  SUBCASE("positive rate with empty measure is an error") {
    JumpSpec spec;
    spec.rate = 0.5;
    spec.measure = Matrix(1, 0);
    Philox4x32 rng(5, 0);
    CHECK_THROWS_AS(maybe_jump(spec, sigma, state, rng), Error);
  }
  SUBCASE("identity sigma returns the raw extreme return") {
    JumpSpec spec;
    spec.rate = 0.999;
    spec.measure = Matrix::Constant(1, 1, 0.25);
    spec.source_indices = {42};
    Philox4x32 rng(6, 0);
    bool jumped = false;
    for (int i = 0; i < 50 && !jumped; ++i) {
      Index source = -1;
      if (auto jump = maybe_jump(spec, sigma, state, rng, &source)) {
        jumped = true;
        CHECK((*jump)(0) == 0.25);
        CHECK(source == 42);
      }
    }
    CHECK(jumped);
  }
}

TEST_CASE("euler_step degenerate cases") {
  SUBCASE("all terms off leaves a flat-curve state unchanged") {
    FactorLayout layout({"EUR"}, {0.0, 1.0, 5.0});
    CalibratedModel model{layout,       GeometricSigma(layout), Matrix::Zero(3, 2), {1, 2}, 1.0, 1.0 / 250.0, {},
                          Matrix(0, 2), {},                     TimeChangeDistribution::trivial(),
                          Vector::Constant(3, 0.04)};
    model.jumps.rate = 0.0;
    model.jumps.measure = Matrix(3, 0);
    Philox4x32 rng(7, 0);
    const Vector next = euler_step(model, model.anchor_state, model.delta, rng);
    CHECK((next - model.anchor_state).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("dt = 0 reduces to the jump alone") {
    CalibratedModel model = tiny_fx_model(0.01, 1.0, 0.9, 0.5);
    Philox4x32 rng(8, 0);
    bool saw_jump = false, saw_hold = false;
    for (int i = 0; i < 200; ++i) {
      StepInfo info;
      const Vector next = euler_step(model, model.anchor_state, 0.0, rng, &info);
      if (info.jumped) {
        saw_jump = true;
        CHECK(next(0) == 0.5);
      } else {
        saw_hold = true;
        CHECK(next(0) == 0.0);
      }
    }
    CHECK(saw_jump);
    CHECK(saw_hold);
  }
  SUBCASE("negative dt rejected") {
    CalibratedModel model = tiny_fx_model(0.01, 1.0);
    Philox4x32 rng(9, 0);
    CHECK_THROWS_AS(euler_step(model, model.anchor_state, -0.1, rng), Error);
  }
}

TEST_CASE("single-driver increment variance matches scale^2 d^2 dt") {
  const double direction = 0.01, scale = 3.0, dt = 1.0 / 250.0;
  CalibratedModel model = tiny_fx_model(direction, scale);
  Philox4x32 rng(10, 0);
  const int n = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double inc = euler_step(model, model.anchor_state, dt, rng)(0);
    sum += inc;
    sum_sq += inc * inc;
  }
  const double mean = sum / n;
  const double variance = sum_sq / n - mean * mean;
  const double expected = scale * scale * direction * direction * dt;
  CHECK(std::abs(variance / expected - 1.0) < 0.03);
}

TEST_CASE("non-finite states abort with diagnostics") {
  CalibratedModel model = tiny_fx_model(1e308, 1e10);
  SimulationConfig sim;
  sim.n_scenarios = 4;
  sim.seed = 11;
  try {
    simulate_scenarios(model, sim);
    FAIL("expected NonFiniteState");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NonFiniteState);
    CHECK(std::string(e.what()).find("scenario") != std::string::npos);
  }
}

TEST_CASE("simulate_scenarios shape, determinism and audit consistency") {
  CalibratedModel model = tiny_fx_model(0.01, 1.0, 0.3, 0.2);
  model.time_change = TimeChangeDistribution{};  // two atoms
  SimulationConfig sim;
  sim.n_scenarios = 500;
  sim.seed = 12;

  const ScenarioSet a = simulate_scenarios(model, sim);
  CHECK(a.states.rows() == 500);
  CHECK(a.states.cols() == 1);
  CHECK(a.audit.size() == 500);

  const ScenarioSet b = simulate_scenarios(model, sim);
  CHECK(a.states == b.states);

  Index jumps = 0;
  for (const auto& audit : a.audit) {
    CHECK(audit.jump_count == static_cast<Index>(audit.jump_sources.size()));
    for (Index src : audit.jump_sources) CHECK(src == 1);  // the single measure column
    CHECK((audit.tau_days == 0.9 || audit.tau_days == 1.9));
    jumps += audit.jump_count;
  }
  CHECK(jumps > 0);

  SUBCASE("threaded run matches single-threaded bytes") {
    SimulationConfig threaded = sim;
    threaded.threads = 3;
    std::ostringstream sa, sb;
    save_scenarios(a, model.layout, sa);
    save_scenarios(simulate_scenarios(model, threaded), model.layout, sb);
    CHECK(sa.str() == sb.str());
  }
}

TEST_CASE("jump occurrences are independent of the Gaussian draws") {
  const double direction = 0.01, scale = 1.0, jump_size = 0.5;
  CalibratedModel model = tiny_fx_model(direction, scale, 0.3, jump_size);
  SimulationConfig sim;
  sim.n_scenarios = 20000;
  sim.seed = 13;
  const ScenarioSet set = simulate_scenarios(model, sim);

  // strip the jump contribution; what remains is the Gaussian part
  const double n = static_cast<double>(sim.n_scenarios);
  Vector indicator(sim.n_scenarios), gaussian_part(sim.n_scenarios);
  for (Index s = 0; s < sim.n_scenarios; ++s) {
    const auto& audit = set.audit[static_cast<std::size_t>(s)];
    indicator(s) = audit.jump_count > 0 ? 1.0 : 0.0;
    gaussian_part(s) = set.states(s, 0) - static_cast<double>(audit.jump_count) * jump_size;
  }
  const double ci = indicator.mean();
  const double cg = gaussian_part.mean();
  const double cov = (indicator.array() - ci).cwiseProduct(gaussian_part.array() - cg).sum() / n;
  const double corr = cov / std::sqrt((indicator.array() - ci).square().sum() / n *
                                      (gaussian_part.array() - cg).square().sum() / n);
  CHECK(std::abs(corr) <= 3.0 / std::sqrt(n));
}

TEST_CASE("diffusive increments pass Mardia's multivariate skewness test") {
  FactorLayout layout({"EUR", "USD", "GBP", "JPY"}, {});
  Matrix directions(3, 3);  // full rank so the sample covariance is invertible
  directions << 0.08, 0.03, 0.01,
               -0.04, 0.09, 0.02,
                0.05, -0.06, 0.07;
  CalibratedModel model{layout,       GeometricSigma(layout), directions, {1, 2, 3}, 1.0, 1.0 / 250.0, {},
                        Matrix(3, 3), {},                     TimeChangeDistribution::trivial(),
                        Vector::Zero(3)};
  model.drift.include_hjm = false;
  model.drift.include_fx_drift = false;
  model.jumps.rate = 0.0;
  model.jumps.measure = Matrix(3, 0);
  model.fx_loadings = model.scale * directions;

  SimulationConfig sim;
  sim.n_scenarios = 10000;
  sim.seed = 14;
  const ScenarioSet set = simulate_scenarios(model, sim);
  const double statistic = oracle::mardia_skewness_statistic(set.states);
  // chi-squared 99% critical value at J(J+1)(J+2)/6 = 10 degrees of freedom
  CHECK(statistic < 23.209);
}

TEST_CASE("substeps and multi-day horizons") {
  CalibratedModel model = tiny_fx_model(0.01, 1.0, 0.2, 0.3);
  SimulationConfig sim;
  sim.n_scenarios = 4000;
  sim.seed = 16;
  sim.horizon_steps = 3;
  sim.steps_per_day = 4;
  const ScenarioSet set = simulate_scenarios(model, sim);
  CHECK(set.states.rows() == 4000);

  // jump triggers are per day, so substeps must not inflate the jump count
  Index jumps = 0;
  for (const auto& audit : set.audit) {
    CHECK(audit.jump_count <= 3);
    jumps += audit.jump_count;
  }
  const double expected = 3.0 * 0.2 * 4000.0;
  CHECK(std::abs(static_cast<double>(jumps) - expected) < 4.0 * std::sqrt(expected));

  // diffusive variance accumulates across days and substeps: 3 days of
  // scale^2 d^2 dt, independent of the substep count
  Vector diffusive(sim.n_scenarios);
  for (Index s = 0; s < sim.n_scenarios; ++s)
    diffusive(s) = set.states(s, 0) - 0.3 * static_cast<double>(set.audit[static_cast<std::size_t>(s)].jump_count);
  const auto stats = oracle::sample_moments(diffusive);
  const double target = 0.01 * 0.01 * 3.0 / 250.0;
  CHECK(std::abs(stats.variance / target - 1.0) < 0.1);
}

TEST_CASE("scenario JSON export") {
  CalibratedModel model = tiny_fx_model(0.01, 1.0);
  SimulationConfig sim;
  sim.n_scenarios = 5;
  sim.seed = 17;
  const ScenarioSet set = simulate_scenarios(model, sim);
  const std::string path = "scengen_scenarios_test.json";
  save_scenarios_json(set, model.layout, path, {{"seed", "17"}});
  std::ifstream in(path);
  std::stringstream content;
  content << in.rdbuf();
  CHECK(content.str().find("\"kind\": \"scengen-scenarios\"") != std::string::npos);
  CHECK(content.str().find("\"tau_days\"") != std::string::npos);
  std::remove(path.c_str());
}

TEST_CASE("scenario CSV layout") {
  CalibratedModel model = tiny_fx_model(0.01, 1.0);
  SimulationConfig sim;
  sim.n_scenarios = 3;
  sim.seed = 15;
  std::ostringstream out;
  save_scenarios(simulate_scenarios(model, sim), model.layout, out, {{"seed", "15"}});
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "# seed = 15");
  std::getline(in, line);
  CHECK(line == "USD_logfx,tau_days,n_jumps");
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 3);
}
