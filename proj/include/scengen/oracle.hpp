#pragma once

#include <cstdint>
#include <functional>
#include <variant>

#include "scengen/layout.hpp"
#include "scengen/panel.hpp"
#include "scengen/types.hpp"

// Brute-force and statistical validators, implemented independently of the
// engine and model code paths they certify. Quadrature, shifting and
// covariance accumulation here deliberately do not call into the library's
// production kernels.

namespace scengen::oracle {

/// Exact geometric Brownian motion per factor with correlated drivers.
struct GbmSpec {
  Vector initial;
  Vector vols;         // annualized, per factor
  Matrix correlation;  // J x J, unit diagonal, positive semidefinite
};

/// Constant-direction diffusion dY = mu dt + sum_i sigma(Y) lambda_i dB_i,
/// simulated with `substeps` Euler substeps per observation tick. With
/// sqrt_vol_on_rates the forward-rate components get the sqrt(level) factor
/// and the no-arbitrage drifts; otherwise sigma is the identity.
struct ConstantDirectionSpec {
  Vector initial;
  Matrix lambdas;  // J x d true directions
  bool sqrt_vol_on_rates = false;
  double rate_floor = 1e-4;
  bool with_drift = true;
  Index substeps = 1;
};

struct SyntheticSpec {
  FactorLayout layout;
  Index length = 500;  // K observations
  double delta = 1.0 / 250.0;
  std::uint64_t seed = 0;
  std::variant<GbmSpec, ConstantDirectionSpec> kind;
};

HistoricalPanel generate_synthetic_panel(const SyntheticSpec& spec);

/// `count` independent one-step increments of the true process started at
/// `from_state`, for distributional comparison against a calibrated model.
Matrix synthetic_one_step_increments(const SyntheticSpec& spec, const Vector& from_state, Index count,
                                     std::uint64_t seed);

/// The quadratic-variation estimator (1 / (delta * N)) * sum of outer
/// products of (optionally transformed) return rows. The transform receives
/// (row index, raw row) and stands in for sigma(Y_i)^-1.
using RowTransform = std::function<Vector(Index, const Vector&)>;
Matrix covariance_estimator(const Matrix& returns, double delta, const RowTransform& transform = {});

struct MomentStats {
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;  // raw (Gaussian = 3)
};

MomentStats sample_moments(const Vector& sample);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(const Vector& a, const Vector& b);

/// 99% two-sample KS critical value for sample sizes n and m.
double ks_critical_99(Index n, Index m);

struct FactorDistance {
  double ks = 0.0;
  double ks_critical = 0.0;  // at 99%
  MomentStats moments_a;
  MomentStats moments_b;
  double mean_gap = 0.0;
  double variance_gap = 0.0;
  double skewness_gap = 0.0;
  double kurtosis_gap = 0.0;
  double mean_gap_se = 0.0;
};

/// Per-factor (column) comparison of two samples.
std::vector<FactorDistance> distribution_distance(const Matrix& sample_a, const Matrix& sample_b);

/// Mardia's multivariate skewness statistic n*b1/6; chi-squared with
/// J(J+1)(J+2)/6 degrees of freedom under multivariate normality.
double mardia_skewness_statistic(const Matrix& sample);

} // namespace scengen::oracle
