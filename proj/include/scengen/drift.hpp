#pragma once

#include <vector>

#include "scengen/types.hpp"

namespace scengen {

/// No-arbitrage drift pieces. Directions come in as sigma-space columns
/// restricted to one curve's tenor slice; `multipliers` is the diagonal of
/// sigma on that slice, so the per-driver volatility at tenor x is
/// v_i(x) = multipliers(x) * directions(x, i), and the calibrated driver
/// weight `scale` enters the quadratic drift squared.
struct DriftSpec {
  bool include_hjm = true;
  bool include_fx_drift = true;
  Vector mu2;  // optional measure-change drift, length J (empty = zero)
};

/// HJM drift on the tenor grid: scale^2 * sum_i v_i(x) * integral_0^x v_i(u) du.
Vector hjm_domestic_drift(const Vector& multipliers, const Matrix& curve_directions, double scale,
                          const std::vector<double>& tenors);

/// Foreign-curve drift under the domestic measure: the HJM drift minus the
/// quanto correction scale * sum_i v_i(x) * delta_i, with delta_i the scaled
/// log-FX loading of driver i.
Vector hjm_foreign_drift(const Vector& multipliers, const Matrix& curve_directions, const Vector& deltas,
                         double scale, const std::vector<double>& tenors);

/// Log-FX drift under the domestic measure: rate differential at the short
/// end minus the quadratic-variation term sum_i delta_i^2 / 2.
double fx_drift(double domestic_short_rate, double foreign_short_rate, const Vector& deltas);

} // namespace scengen
