#include "scengen/validation.hpp"

#include <cmath>
#include <sstream>

#include "scengen/engine.hpp"
#include "scengen/model.hpp"
#include "scengen/oracle.hpp"
#include "scengen/risk.hpp"
#include "scengen/rng.hpp"

namespace scengen::validation {

namespace {

double relative_frobenius(const Matrix& got, const Matrix& want) {
  return (got - want).norm() / want.norm();
}

/// Calibration straight off raw returns (no vol rescaling, no extreme split);
/// this is the plain quadratic-variation construction the convergence checks
/// instantiate.
CalibratedModel calibrate_raw(const HistoricalPanel& panel, const ModelConfig& config) {
  FilteredReturns raw;
  raw.first_index = 1;
  raw.values = compute_returns(panel);
  return build_calibrated_model(panel, raw, ExtremeEventSet{}, config);
}

ModelConfig diffusion_only_config() {
  ModelConfig config;
  config.include_hjm = false;
  config.include_fx_drift = false;
  config.jump_rate = 0.0;
  config.time_change = TimeChangeDistribution::trivial();
  return config;
}

/// 5 mixed factors: two 2-tenor curves plus one log-FX rate, two true drivers.
oracle::SyntheticSpec mixed_panel_spec(std::uint64_t seed, Index length) {
  FactorLayout layout({"EUR", "USD"}, {0.0, 1.0});
  oracle::ConstantDirectionSpec cd;
  cd.initial = Vector(5);
  cd.initial << 0.030, 0.032, 0.035, 0.036, 0.10;
  cd.lambdas = Matrix(5, 2);
  cd.lambdas << 0.060, -0.020,
                0.050,  0.030,
                0.030,  0.050,
                0.025,  0.040,
                0.100, -0.070;
  cd.sqrt_vol_on_rates = true;
  cd.with_drift = true;
  return oracle::SyntheticSpec{layout, length, 1.0 / 250.0, seed, cd};
}

/// J = 3 log-FX-only factors, two correlated drivers, identity sigma.
oracle::SyntheticSpec fx_panel_spec(std::uint64_t seed, Index length) {
  FactorLayout layout({"EUR", "USD", "GBP", "JPY"}, {});
  oracle::ConstantDirectionSpec cd;
  cd.initial = Vector(3);
  cd.initial << 0.10, -0.20, 0.05;
  cd.lambdas = Matrix(3, 2);
  cd.lambdas << 0.080,  0.030,
               -0.040,  0.090,
                0.050, -0.060;
  cd.with_drift = true;
  return oracle::SyntheticSpec{layout, length, 1.0 / 250.0, seed, cd};
}

} // namespace

CheckResult covariance_identity(std::uint64_t seed, Index n_scenarios, double scale_fault, Index threads) {
  const auto spec = mixed_panel_spec(seed, 250);
  const HistoricalPanel panel = oracle::generate_synthetic_panel(spec);
  const FilterResult filtered = run_filter(panel, FilterConfig{});
  CalibratedModel model = build_calibrated_model(panel, filtered.filtered, filtered.extremes, diffusion_only_config());
  model.scale *= scale_fault;

  SimulationConfig sim;
  sim.n_scenarios = n_scenarios;
  sim.seed = seed + 1;
  sim.threads = threads;
  const ScenarioSet scenarios = simulate_scenarios(model, sim);

  Matrix increments = scenarios.states.rowwise() - model.anchor_state.transpose();
  increments.rowwise() -= increments.colwise().mean();
  const Matrix sample = oracle::covariance_estimator(increments, 1.0);

  // theorem covariance at horizon t = delta: (t / (delta N_d)) sum d d^T
  const Matrix scaled =
      model.sigma.multipliers(model.anchor_state).asDiagonal() * model.directions;
  const Matrix expected = scaled * scaled.transpose() / static_cast<double>(model.driver_count());

  CheckResult result{"covariance_identity", false, relative_frobenius(sample, expected), 0.05, ""};
  result.passed = result.observed <= result.bound;
  std::ostringstream detail;
  detail << "relative Frobenius error over " << n_scenarios << " scenarios, " << model.driver_count() << " drivers";
  result.detail = detail.str();
  return result;
}

CheckResult time_change_mean(std::uint64_t seed, Index draws) {
  const TimeChangeDistribution dist;  // default two atoms
  Philox4x32 rng(seed, 0x7c);
  double sum = 0.0, sum_sq = 0.0;
  for (Index i = 0; i < draws; ++i) {
    const double tau = sample_time_change(dist, rng);
    sum += tau;
    sum_sq += tau * tau;
  }
  const double mean = sum / static_cast<double>(draws);
  const double variance = sum_sq / static_cast<double>(draws) - mean * mean;
  const double se = std::sqrt(variance / static_cast<double>(draws));
  CheckResult result{"time_change_mean", false, std::abs(mean - dist.mean()), 3.0 * se, ""};
  result.passed = result.observed <= result.bound && std::abs(dist.mean() - 1.0) < 1e-12;
  std::ostringstream detail;
  detail << "empirical mean " << mean << " vs " << dist.mean() << " over " << draws << " draws";
  result.detail = detail.str();
  return result;
}

CheckResult kurtosis_fattening(std::uint64_t seed, Index n_scenarios) {
  FactorLayout layout({"EUR", "USD"}, {});
  oracle::ConstantDirectionSpec cd;
  cd.initial = Vector::Constant(1, 0.0);
  cd.lambdas = Matrix::Constant(1, 1, 0.01);
  cd.with_drift = false;
  const HistoricalPanel panel =
      oracle::generate_synthetic_panel(oracle::SyntheticSpec{layout, 160, 1.0 / 250.0, seed, cd});

  CalibratedModel model = calibrate_raw(panel, diffusion_only_config());

  SimulationConfig sim;
  sim.n_scenarios = n_scenarios;
  sim.seed = seed + 11;

  model.time_change = TimeChangeDistribution::trivial();
  const ScenarioSet plain = simulate_scenarios(model, sim);
  model.time_change = TimeChangeDistribution{};  // two atoms
  const ScenarioSet fattened = simulate_scenarios(model, sim);

  const double anchor = model.anchor_state(0);
  const auto kurt = [&](const ScenarioSet& set) {
    return oracle::sample_moments((set.states.col(0).array() - anchor).matrix()).kurtosis;
  };
  const double gap = kurt(fattened) - kurt(plain);
  // one-sided margin: three (Gaussian-approximation) standard errors of the gap
  const double margin = 3.0 * std::sqrt(2.0 * 24.0 / static_cast<double>(n_scenarios));
  CheckResult result{"kurtosis_fattening", gap >= margin, gap, margin, ""};
  std::ostringstream detail;
  detail << "kurtosis " << kurt(fattened) << " (two-atom) vs " << kurt(plain) << " (trivial)";
  result.detail = detail.str();
  return result;
}

namespace {

/// Single-FX panel with six injected outlier returns, so the calibrated jump
/// measure is nonempty.
CalibratedModel jump_test_model(std::uint64_t seed, double jump_rate) {
  FactorLayout layout({"EUR", "USD"}, {});
  oracle::ConstantDirectionSpec cd;
  cd.initial = Vector::Constant(1, 0.0);
  cd.lambdas = Matrix::Constant(1, 1, 0.01);
  cd.with_drift = false;
  HistoricalPanel panel = oracle::generate_synthetic_panel(oracle::SyntheticSpec{layout, 160, 1.0 / 250.0, seed, cd});
  for (Index at : {50, 70, 90, 110, 130, 150})
    panel.values.bottomRows(panel.observation_count() - at).array() += 0.20;

  FilterConfig filter;
  filter.violations = 1;
  const FilterResult filtered = run_filter(panel, filter);

  ModelConfig config = diffusion_only_config();
  config.jump_rate = jump_rate;
  CalibratedModel model = build_calibrated_model(panel, filtered.filtered, filtered.extremes, config);
  if (model.jumps.measure.cols() == 0)
    raise(Errc::EmptyJumpMeasure, "jump test panel produced no extreme events");
  return model;
}

} // namespace

CheckResult jump_frequency(std::uint64_t seed, Index n_scenarios, Index runs, Index min_in_band) {
  Index in_band = 0;
  Index last_total = 0;
  for (Index r = 0; r < runs; ++r) {
    const CalibratedModel model = jump_test_model(seed + static_cast<std::uint64_t>(r) * 1000, 0.02);
    SimulationConfig sim;
    sim.n_scenarios = n_scenarios;
    sim.seed = seed + static_cast<std::uint64_t>(r) * 1000 + 17;
    const ScenarioSet set = simulate_scenarios(model, sim);
    Index total = 0;
    for (const auto& audit : set.audit) total += audit.jump_count;
    last_total = total;
    if (total >= 75 && total <= 127) ++in_band;
  }
  CheckResult result{"jump_frequency", in_band >= min_in_band, static_cast<double>(in_band),
                     static_cast<double>(min_in_band), ""};
  std::ostringstream detail;
  detail << in_band << "/" << runs << " runs inside [75, 127]; last run saw " << last_total << " jumps in "
         << n_scenarios << " scenarios";
  result.detail = detail.str();
  return result;
}

CheckResult backtest_coverage(std::uint64_t seed, Index scenarios_per_day, Index window_days, Index threads) {
  const Index calibration_days = 250;
  const auto spec = fx_panel_spec(seed, calibration_days + window_days);
  const HistoricalPanel panel = oracle::generate_synthetic_panel(spec);

  BacktestConfig config;
  config.window_days = window_days;
  config.calibration_days = calibration_days;
  config.confidence = 0.99;
  // correctly specified for an i.i.d. panel: the variance floor above any
  // realized level pins every vol ratio at one, and jumps/time change are off
  config.filter.variance_floor = 1e6;
  config.model = diffusion_only_config();
  config.model.include_fx_drift = true;
  config.simulation.n_scenarios = scenarios_per_day;
  config.simulation.seed = seed + 101;
  config.simulation.threads = threads;

  const Portfolio portfolio({{Instrument::Kind::FxSpot, 1, 0.0, 100.0},
                             {Instrument::Kind::FxSpot, 2, 0.0, -50.0},
                             {Instrument::Kind::FxSpot, 3, 0.0, 30.0}});
  const BacktestReport report = backtest(panel, portfolio, config);

  bool es_ok = true;
  for (const auto& day : report.days) es_ok = es_ok && day.es >= day.var;

  CheckResult result{"backtest_coverage", false, static_cast<double>(report.var_violations), 7.0, ""};
  result.passed = report.var_violations <= 7 && es_ok;
  std::ostringstream detail;
  detail << report.var_violations << " VaR violations and " << report.es_breaches << " ES breaches in "
         << report.days.size() << " days; ES >= VaR " << (es_ok ? "held" : "VIOLATED");
  result.detail = detail.str();
  return result;
}

namespace {

/// J = 5 log-FX-only factors, two drivers touching every factor.
oracle::SyntheticSpec wide_fx_panel_spec(std::uint64_t seed, Index length) {
  FactorLayout layout({"EUR", "USD", "GBP", "JPY", "CHF", "ZAR"}, {});
  oracle::ConstantDirectionSpec cd;
  cd.initial = Vector(5);
  cd.initial << 0.10, -0.20, 0.05, 0.30, -0.15;
  cd.lambdas = Matrix(5, 2);
  cd.lambdas << 0.080,  0.030,
               -0.040,  0.090,
                0.050, -0.060,
                0.070,  0.020,
               -0.030, -0.080;
  cd.with_drift = true;
  return oracle::SyntheticSpec{layout, length, 1.0 / 250.0, seed, cd};
}

} // namespace

CheckResult convergence_monotonicity(std::uint64_t seed, Index reps, Index min_monotone) {
  const Index lengths[3] = {250, 1000, 4000};
  // The sample is confined to the 2-driver subspace, so a single panel's
  // Frobenius error has only ~3 effective degrees of freedom and fluctuates
  // by +-35%. Each repetition therefore measures the error at each K as the
  // mean over several independent panels (shorter estimates use prefixes of
  // the longer sample), which pins down the expected 1/sqrt(K) decay.
  const Index panels_per_rep = 8;
  Index monotone = 0;
  double last_errors[3] = {0, 0, 0};
  for (Index r = 0; r < reps; ++r) {
    double errors[3] = {0, 0, 0};
    for (Index p = 0; p < panels_per_rep; ++p) {
      const auto spec = wide_fx_panel_spec(seed + static_cast<std::uint64_t>(r) * 977 + static_cast<std::uint64_t>(p),
                                           lengths[2]);
      const HistoricalPanel panel = oracle::generate_synthetic_panel(spec);
      const Matrix returns = compute_returns(panel);
      const auto& cd = std::get<oracle::ConstantDirectionSpec>(spec.kind);
      const Matrix truth = cd.lambdas * cd.lambdas.transpose();
      for (int k = 0; k < 3; ++k) {
        const Matrix estimate = oracle::covariance_estimator(returns.topRows(lengths[k] - 1), panel.delta);
        errors[k] += relative_frobenius(estimate, truth) / static_cast<double>(panels_per_rep);
      }
    }
    for (int k = 0; k < 3; ++k) last_errors[k] = errors[k];
    if (errors[0] > errors[1] && errors[1] > errors[2]) ++monotone;
  }
  CheckResult result{"convergence_monotonicity", monotone >= min_monotone, static_cast<double>(monotone),
                     static_cast<double>(min_monotone), ""};
  std::ostringstream detail;
  detail << monotone << "/" << reps << " repetitions monotone (error at each K averaged over " << panels_per_rep
         << " panels); last errors " << last_errors[0] << " > " << last_errors[1] << " > " << last_errors[2];
  result.detail = detail.str();
  return result;
}

CheckResult convergence_ks(std::uint64_t seed, Index samples) {
  const auto spec = fx_panel_spec(seed, 4000);
  const HistoricalPanel panel = oracle::generate_synthetic_panel(spec);

  ModelConfig config = diffusion_only_config();
  config.include_fx_drift = true;  // matches the generator's drift
  const CalibratedModel model = calibrate_raw(panel, config);

  SimulationConfig sim;
  sim.n_scenarios = samples;
  sim.seed = seed + 3;
  const ScenarioSet scenarios = simulate_scenarios(model, sim);
  const Matrix calibrated_increments = scenarios.states.rowwise() - model.anchor_state.transpose();
  const Matrix true_increments = oracle::synthetic_one_step_increments(spec, model.anchor_state, samples, seed + 4);

  const auto distances = oracle::distribution_distance(calibrated_increments, true_increments);
  double worst_ratio = 0.0;
  for (const auto& fd : distances) worst_ratio = std::max(worst_ratio, fd.ks / fd.ks_critical);
  CheckResult result{"convergence_ks", worst_ratio < 1.0, worst_ratio, 1.0, ""};
  std::ostringstream detail;
  detail << "max per-factor KS / critical(99%) over " << distances.size() << " factors at K = 4000";
  result.detail = detail.str();
  return result;
}

CheckResult hjm_closed_form() {
  std::vector<double> tenors;
  for (int i = 0; i <= 20; ++i) tenors.push_back(0.5 * static_cast<double>(i));
  const Index n = static_cast<Index>(tenors.size());
  const double c = 0.02;
  const Vector drift = hjm_domestic_drift(Vector::Ones(n), Matrix::Constant(n, 1, c), 1.0, tenors);
  double worst = std::abs(drift(0));  // closed form is 0 at x = 0
  for (Index i = 1; i < n; ++i) {
    const double closed_form = c * c * tenors[static_cast<std::size_t>(i)];
    worst = std::max(worst, std::abs(drift(i) - closed_form) / closed_form);
  }
  CheckResult result{"hjm_closed_form", worst <= 0.005, worst, 0.005,
                     "max relative gap to c^2 x across grid tenors"};
  return result;
}

CheckResult bond_martingale(std::uint64_t seed, Index paths, Index days) {
  FactorLayout layout({"EUR"}, [] {
    std::vector<double> tenors;
    for (int i = 0; i <= 20; ++i) tenors.push_back(0.5 * static_cast<double>(i));
    return tenors;
  }());
  const Index n = layout.tenor_count();

  CalibratedModel model{layout, GeometricSigma::identity(layout), Matrix::Constant(n, 1, 0.01), {1}, 1.0,
                        1.0 / 250.0, {}, Matrix(0, 1), {}, TimeChangeDistribution::trivial(),
                        Vector::Constant(n, 0.03)};
  model.drift.include_fx_drift = false;
  model.jumps.rate = 0.0;
  model.jumps.measure.resize(n, 0);

  const double bond_maturity = 5.0;
  const double dt = model.delta;
  const double initial_price = zcb_price(model.anchor_state, layout.tenor_grid(), bond_maturity);

  double sum = 0.0, sum_sq = 0.0;
  for (Index p = 0; p < paths; ++p) {
    Philox4x32 rng(seed, static_cast<std::uint64_t>(p));
    Vector state = model.anchor_state;
    double discount = 1.0;
    for (Index day = 0; day < days; ++day) {
      discount *= std::exp(-state(0) * dt);
      state = euler_step(model, state, dt, rng, nullptr, false);
    }
    const double value =
        discount * zcb_price(state, layout.tenor_grid(), bond_maturity - static_cast<double>(days) * dt);
    sum += value;
    sum_sq += value * value;
  }
  const double mean = sum / static_cast<double>(paths);
  const double variance = sum_sq / static_cast<double>(paths) - mean * mean;
  const double se = std::sqrt(variance / static_cast<double>(paths));
  CheckResult result{"bond_martingale", false, std::abs(mean - initial_price), 3.0 * se, ""};
  result.passed = result.observed <= result.bound;
  std::ostringstream detail;
  detail << "discounted 5y bond mean " << mean << " vs " << initial_price << " over " << paths << " paths, " << days
         << " days";
  result.detail = detail.str();
  return result;
}

CheckResult sigma_roundtrip(std::uint64_t seed, Index n_states) {
  const FactorLayout layout({"EUR", "USD"}, {0.0, 1.0, 5.0});
  const GeometricSigma sigma(layout);
  Philox4x32 rng(seed, 0x51);
  double worst = 0.0;
  for (Index s = 0; s < n_states; ++s) {
    Vector state(layout.factor_count());
    for (Index j = 0; j < state.size(); ++j) {
      const auto desc = layout.factor(j);
      // rates from -2% to 10% so sub-floor levels are exercised
      state(j) = desc.type == FactorType::ForwardRate ? -0.02 + 0.12 * rng.uniform01()
                                                      : -1.0 + 2.0 * rng.uniform01();
    }
    Vector v(layout.factor_count());
    for (Index j = 0; j < v.size(); ++j) v(j) = -1.0 + 2.0 * rng.uniform01();
    const Vector round_tripped = sigma.inverse_apply(state, sigma.apply(state, v));
    const double err = (round_tripped - v).cwiseAbs().maxCoeff() / std::max(1e-300, v.cwiseAbs().maxCoeff());
    worst = std::max(worst, err);
  }
  return {"sigma_roundtrip", worst <= 1e-12, worst, 1e-12,
          "max relative identity error over " + std::to_string(n_states) + " random states"};
}

CheckResult extreme_monotonicity(std::uint64_t seed, Index n_panels) {
  const double etas[4] = {2.0, 3.0, 4.0, 5.0};
  const Index violation_counts[4] = {1, 2, 4, 8};
  Index counterexamples = 0;
  const FactorLayout layout({"EUR", "USD", "GBP", "JPY", "CHF"}, {});  // 4 log-FX factors

  for (Index p = 0; p < n_panels; ++p) {
    Philox4x32 rng(seed + static_cast<std::uint64_t>(p), 0xE0);
    const Index k = 120;
    Matrix values(k, 4);
    Vector state = Vector::Zero(4);
    for (Index t = 0; t < k; ++t) {
      values.row(t) = state.transpose();
      for (Index j = 0; j < 4; ++j) {
        // occasional 5x moves make the sweep see real extremes
        const double boost = rng.uniform01() < 0.05 ? 5.0 : 1.0;
        state(j) += 0.01 * boost * rng.gaussian();
      }
    }
    HistoricalPanel panel{layout, {}, values, 1.0 / 250.0};
    for (Index t = 0; t < k; ++t) panel.dates.push_back("d" + std::to_string(1000 + t));

    const Matrix returns = compute_returns(panel);
    const SlidingVariance sv = sliding_variance(returns, 20);
    const FilteredReturns filtered = rescale_returns(returns, vol_ratio(sv, 1e-12));

    Index counts[4][4];
    for (int e = 0; e < 4; ++e)
      for (int m = 0; m < 4; ++m)
        counts[e][m] = static_cast<Index>(
            detect_extreme_events(filtered, sv.today(), etas[e], violation_counts[m]).indices.size());
    for (int e = 0; e + 1 < 4; ++e)
      for (int m = 0; m < 4; ++m)
        if (counts[e][m] < counts[e + 1][m]) ++counterexamples;
    for (int e = 0; e < 4; ++e)
      for (int m = 0; m + 1 < 4; ++m)
        if (counts[e][m] < counts[e][m + 1]) ++counterexamples;
  }
  return {"extreme_monotonicity", counterexamples == 0, static_cast<double>(counterexamples), 0.0,
          "monotonicity counterexamples over " + std::to_string(n_panels) + " random panels"};
}

CheckResult determinism(std::uint64_t seed, Index n_scenarios, Index threads) {
  const auto spec = mixed_panel_spec(seed, 250);
  const HistoricalPanel panel = oracle::generate_synthetic_panel(spec);
  const FilterResult filtered = run_filter(panel, FilterConfig{});
  ModelConfig config;  // defaults: drift on, jumps on (measure may clamp), two-atom time change
  const CalibratedModel model = build_calibrated_model(panel, filtered.filtered, filtered.extremes, config);

  SimulationConfig sim;
  sim.n_scenarios = n_scenarios;
  sim.seed = seed + 5;
  const auto render = [&](Index n_threads) {
    SimulationConfig run = sim;
    run.threads = n_threads;
    std::ostringstream out;
    save_scenarios(simulate_scenarios(model, run), model.layout, out);
    return out.str();
  };

  const std::string once = render(1);
  const std::string again = render(1);
  const std::string parallel = render(threads);
  Index mismatches = 0;
  if (once != again) ++mismatches;
  if (once != parallel) ++mismatches;
  return {"determinism", mismatches == 0, static_cast<double>(mismatches), 0.0,
          "byte comparison of scenario CSV across reruns and " + std::to_string(threads) + " threads"};
}

std::vector<CheckResult> run_all(const Params& params) {
  std::vector<CheckResult> results;
  results.push_back(covariance_identity(params.seed, 50000, params.scale_fault, params.threads));
  results.push_back(time_change_mean(params.seed, 1000000));
  results.push_back(kurtosis_fattening(params.seed, 50000));
  results.push_back(jump_frequency(params.seed, params.n_scenarios, 1, 1));
  results.push_back(backtest_coverage(params.seed, 2000, 250, params.threads));
  results.push_back(convergence_monotonicity(params.seed, 5, 4));
  results.push_back(convergence_ks(params.seed, 10000));
  results.push_back(hjm_closed_form());
  results.push_back(bond_martingale(params.seed, 20000, 10));
  results.push_back(sigma_roundtrip(params.seed, 10000));
  results.push_back(extreme_monotonicity(params.seed, 20));
  results.push_back(determinism(params.seed, 2000, 4));
  return results;
}

} // namespace scengen::validation
