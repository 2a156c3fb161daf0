#include "scengen/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "scengen/rng.hpp"

namespace scengen::oracle {

namespace {

// Local curve helpers; the production shift/quadrature code is not reused here.

double interp_flat(const Vector& curve, const std::vector<double>& tenors, double x) {
  const Index n = curve.size();
  if (x <= tenors.front()) return curve(0);
  if (x >= tenors.back()) return curve(n - 1);
  Index lo = 0;
  while (lo + 1 < n && tenors[static_cast<std::size_t>(lo + 1)] <= x) ++lo;
  const double x0 = tenors[static_cast<std::size_t>(lo)];
  const double x1 = tenors[static_cast<std::size_t>(lo + 1)];
  return curve(lo) + (curve(lo + 1) - curve(lo)) * (x - x0) / (x1 - x0);
}

Vector shift_curve(const Vector& curve, const std::vector<double>& tenors, double t) {
  Vector out(curve.size());
  for (Index i = 0; i < curve.size(); ++i) out(i) = interp_flat(curve, tenors, tenors[static_cast<std::size_t>(i)] + t);
  return out;
}

// running integral from zero, flat to the left of the first tenor
Vector running_integral(const Vector& f, const std::vector<double>& tenors) {
  Vector integral(f.size());
  double acc = f(0) * tenors[0];
  integral(0) = acc;
  for (Index i = 1; i < f.size(); ++i) {
    acc += 0.5 * (f(i) + f(i - 1)) * (tenors[static_cast<std::size_t>(i)] - tenors[static_cast<std::size_t>(i - 1)]);
    integral(i) = acc;
  }
  return integral;
}

Vector sigma_multipliers(const ConstantDirectionSpec& spec, const FactorLayout& layout, const Vector& state) {
  Vector m = Vector::Ones(state.size());
  if (!spec.sqrt_vol_on_rates) return m;
  for (Index j = 0; j < state.size(); ++j)
    if (layout.factor(j).type == FactorType::ForwardRate) m(j) = std::sqrt(std::max(state(j), spec.rate_floor));
  return m;
}

Vector true_drift(const ConstantDirectionSpec& spec, const FactorLayout& layout, const Vector& state) {
  const Index j_count = layout.factor_count();
  Vector drift = Vector::Zero(j_count);
  if (!spec.with_drift) return drift;
  const Index n = layout.tenor_count();
  const Index d = spec.lambdas.cols();
  const auto& tenors = layout.tenor_grid();
  const Vector mult = sigma_multipliers(spec, layout, state);
  if (n > 0) {
    for (Index c = 0; c < layout.currency_count(); ++c) {
      const Index off = layout.curve_offset(c);
      for (Index i = 0; i < d; ++i) {
        const Vector vol = mult.segment(off, n).cwiseProduct(spec.lambdas.col(i).segment(off, n));
        drift.segment(off, n) += vol.cwiseProduct(running_integral(vol, tenors));
        if (c > 0) drift.segment(off, n) -= spec.lambdas(layout.fx_index(c), i) * vol;
      }
    }
  }
  for (Index c = 1; c < layout.currency_count(); ++c) {
    const double dom = n > 0 ? state(layout.curve_offset(0)) : 0.0;
    const double forgn = n > 0 ? state(layout.curve_offset(c)) : 0.0;
    double quad = 0.0;
    for (Index i = 0; i < d; ++i) quad += spec.lambdas(layout.fx_index(c), i) * spec.lambdas(layout.fx_index(c), i);
    drift(layout.fx_index(c)) = dom - forgn - 0.5 * quad;
  }
  return drift;
}

Vector constant_direction_tick(const ConstantDirectionSpec& spec, const FactorLayout& layout, const Vector& start,
                               double delta, Philox4x32& rng) {
  const Index n = layout.tenor_count();
  const Index substeps = std::max<Index>(1, spec.substeps);
  const double dt = delta / static_cast<double>(substeps);
  const double sqrt_dt = std::sqrt(dt);
  Vector state = start;
  Vector z(spec.lambdas.cols());
  for (Index s = 0; s < substeps; ++s) {
    for (Index i = 0; i < z.size(); ++i) z(i) = rng.gaussian();
    const Vector drift = true_drift(spec, layout, state);
    const Vector noise = sigma_multipliers(spec, layout, state).cwiseProduct(spec.lambdas * z);
    Vector next(state.size());
    for (Index c = 0; c < layout.currency_count() && n > 0; ++c) {
      const Index off = layout.curve_offset(c);
      next.segment(off, n) = shift_curve(state.segment(off, n), layout.tenor_grid(), dt);
    }
    for (Index c = 1; c < layout.currency_count(); ++c) next(layout.fx_index(c)) = state(layout.fx_index(c));
    state = next + dt * drift + sqrt_dt * noise;
  }
  return state;
}

Matrix correlation_factor(const Matrix& correlation) {
  const Index j_count = correlation.rows();
  if (correlation.cols() != j_count) raise(Errc::InvalidCorrelation, "correlation matrix must be square");
  for (Index r = 0; r < j_count; ++r) {
    if (std::abs(correlation(r, r) - 1.0) > 1e-9)
      raise(Errc::InvalidCorrelation, "correlation diagonal must be one");
    for (Index c = 0; c < r; ++c)
      if (std::abs(correlation(r, c) - correlation(c, r)) > 1e-9)
        raise(Errc::InvalidCorrelation, "correlation matrix must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eigen(correlation);
  const Vector values = eigen.eigenvalues();
  if (values.minCoeff() < -1e-8) raise(Errc::InvalidCorrelation, "correlation matrix is not positive semidefinite");
  return eigen.eigenvectors() * values.cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

Vector gbm_tick(const GbmSpec& spec, const Matrix& factor, const Vector& start, double delta, Philox4x32& rng) {
  Vector z(start.size());
  for (Index j = 0; j < z.size(); ++j) z(j) = rng.gaussian();
  const Vector eta = factor * z;
  const double sqrt_delta = std::sqrt(delta);
  Vector next(start.size());
  for (Index j = 0; j < start.size(); ++j) {
    const double v = spec.vols(j);
    next(j) = start(j) * std::exp(-0.5 * v * v * delta + v * sqrt_delta * eta(j));
  }
  return next;
}

} // namespace

HistoricalPanel generate_synthetic_panel(const SyntheticSpec& spec) {
  if (spec.length < 1) raise(Errc::BadConfig, "synthetic panel needs at least one observation");
  const Index j_count = spec.layout.factor_count();
  HistoricalPanel panel{spec.layout, {}, Matrix(spec.length, j_count), spec.delta};

  Philox4x32 rng(spec.seed, 0x0f0f0f0fULL);
  Vector state;
  Matrix gbm_factor;
  if (const auto* gbm = std::get_if<GbmSpec>(&spec.kind)) {
    if (gbm->initial.size() != j_count || gbm->vols.size() != j_count)
      raise(Errc::LengthMismatch, "GBM spec dimensions do not match the layout");
    gbm_factor = correlation_factor(gbm->correlation);
    state = gbm->initial;
  } else {
    const auto& cd = std::get<ConstantDirectionSpec>(spec.kind);
    if (cd.initial.size() != j_count || cd.lambdas.rows() != j_count)
      raise(Errc::LengthMismatch, "constant-direction spec dimensions do not match the layout");
    state = cd.initial;
  }

  char date[32];
  for (Index t = 0; t < spec.length; ++t) {
    if (t > 0) {
      if (const auto* gbm = std::get_if<GbmSpec>(&spec.kind))
        state = gbm_tick(*gbm, gbm_factor, state, spec.delta, rng);
      else
        state = constant_direction_tick(std::get<ConstantDirectionSpec>(spec.kind), spec.layout, state, spec.delta,
                                        rng);
    }
    panel.values.row(t) = state.transpose();
    // synthetic calendar: sequential ISO dates, plenty for ordering
    std::snprintf(date, sizeof(date), "%04lld-%02lld-%02lld", static_cast<long long>(2000 + t / 372),
                  static_cast<long long>(1 + (t / 31) % 12), static_cast<long long>(1 + t % 31));
    panel.dates.emplace_back(date);
  }
  return panel;
}

Matrix synthetic_one_step_increments(const SyntheticSpec& spec, const Vector& from_state, Index count,
                                     std::uint64_t seed) {
  Matrix increments(count, from_state.size());
  if (const auto* gbm = std::get_if<GbmSpec>(&spec.kind)) {
    const Matrix factor = correlation_factor(gbm->correlation);
    for (Index s = 0; s < count; ++s) {
      Philox4x32 rng(seed, static_cast<std::uint64_t>(s) + 1);
      increments.row(s) = (gbm_tick(*gbm, factor, from_state, spec.delta, rng) - from_state).transpose();
    }
  } else {
    const auto& cd = std::get<ConstantDirectionSpec>(spec.kind);
    for (Index s = 0; s < count; ++s) {
      Philox4x32 rng(seed, static_cast<std::uint64_t>(s) + 1);
      increments.row(s) =
          (constant_direction_tick(cd, spec.layout, from_state, spec.delta, rng) - from_state).transpose();
    }
  }
  return increments;
}

Matrix covariance_estimator(const Matrix& returns, double delta, const RowTransform& transform) {
  const Index n = returns.rows();
  if (n < 1) raise(Errc::TooFewSamples, "covariance estimator needs at least one return");
  if (!(delta > 0.0)) raise(Errc::BadConfig, "delta must be positive");
  const Index j_count = returns.cols();
  Matrix acc = Matrix::Zero(j_count, j_count);
  for (Index i = 0; i < n; ++i) {
    const Vector row = transform ? transform(i, returns.row(i).transpose()) : returns.row(i).transpose();
    acc.noalias() += row * row.transpose();
  }
  return acc / (delta * static_cast<double>(n));
}

MomentStats sample_moments(const Vector& sample) {
  const Index n = sample.size();
  if (n < 2) raise(Errc::TooFewSamples, "need at least two samples for moments");
  MomentStats stats;
  stats.mean = sample.mean();
  const Vector centered = sample.array() - stats.mean;
  const double m2 = centered.array().square().mean();
  const double m3 = centered.array().cube().mean();
  const double m4 = centered.array().square().square().mean();
  stats.variance = m2;
  stats.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  stats.kurtosis = m2 > 0.0 ? m4 / (m2 * m2) : 0.0;
  return stats;
}

double ks_statistic(const Vector& a, const Vector& b) {
  if (a.size() == 0 || b.size() == 0) raise(Errc::TooFewSamples, "KS statistic needs nonempty samples");
  std::vector<double> sa(a.data(), a.data() + a.size());
  std::vector<double> sb(b.data(), b.data() + b.size());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t ia = 0, ib = 0;
  double max_gap = 0.0;
  while (ia < sa.size() && ib < sb.size()) {
    // consume ties in both samples before measuring the CDF gap
    const double x = std::min(sa[ia], sb[ib]);
    while (ia < sa.size() && sa[ia] == x) ++ia;
    while (ib < sb.size() && sb[ib] == x) ++ib;
    max_gap = std::max(max_gap, std::abs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb));
  }
  return max_gap;
}

double ks_critical_99(Index n, Index m) {
  return 1.628 * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * static_cast<double>(m)));
}

std::vector<FactorDistance> distribution_distance(const Matrix& sample_a, const Matrix& sample_b) {
  if (sample_a.cols() != sample_b.cols()) raise(Errc::LengthMismatch, "samples have different factor counts");
  if (sample_a.rows() == 0 || sample_b.rows() == 0) raise(Errc::TooFewSamples, "samples must be nonempty");
  std::vector<FactorDistance> out;
  for (Index j = 0; j < sample_a.cols(); ++j) {
    FactorDistance fd;
    fd.ks = ks_statistic(sample_a.col(j), sample_b.col(j));
    fd.ks_critical = ks_critical_99(sample_a.rows(), sample_b.rows());
    fd.moments_a = sample_moments(sample_a.col(j));
    fd.moments_b = sample_moments(sample_b.col(j));
    fd.mean_gap = fd.moments_b.mean - fd.moments_a.mean;
    fd.variance_gap = fd.moments_b.variance - fd.moments_a.variance;
    fd.skewness_gap = fd.moments_b.skewness - fd.moments_a.skewness;
    fd.kurtosis_gap = fd.moments_b.kurtosis - fd.moments_a.kurtosis;
    fd.mean_gap_se = std::sqrt(fd.moments_a.variance / static_cast<double>(sample_a.rows()) +
                               fd.moments_b.variance / static_cast<double>(sample_b.rows()));
    out.push_back(fd);
  }
  return out;
}

double mardia_skewness_statistic(const Matrix& sample) {
  const Index n = sample.rows();
  const Index j_count = sample.cols();
  if (n < j_count + 1) raise(Errc::TooFewSamples, "Mardia statistic needs more samples than dimensions");
  const Matrix centered = sample.rowwise() - sample.colwise().mean();
  const Matrix cov = centered.transpose() * centered / static_cast<double>(n);
  Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success)
    raise(Errc::InvalidCorrelation, "sample covariance is singular; Mardia statistic undefined");
  // standardized rows: y_i = L^-1 x_i, so y_i . y_j = x_i cov^-1 x_j
  const Matrix standardized = llt.matrixL().solve(centered.transpose()).transpose();
  double b1 = 0.0;
  const Index block = 512;
  for (Index r0 = 0; r0 < n; r0 += block) {
    const Index rows = std::min(block, n - r0);
    const Matrix gram = standardized.middleRows(r0, rows) * standardized.transpose();
    b1 += gram.array().cube().sum();
  }
  b1 /= static_cast<double>(n) * static_cast<double>(n);
  return static_cast<double>(n) * b1 / 6.0;
}

} // namespace scengen::oracle
