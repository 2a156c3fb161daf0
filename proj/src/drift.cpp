#include "scengen/drift.hpp"

#include "scengen/error.hpp"
#include "scengen/shift.hpp"

namespace scengen {

Vector hjm_domestic_drift(const Vector& multipliers, const Matrix& curve_directions, double scale,
                          const std::vector<double>& tenors) {
  const Index n = multipliers.size();
  if (curve_directions.rows() != n) raise(Errc::LengthMismatch, "direction rows do not match the curve grid");
  Vector drift = Vector::Zero(n);
  for (Index i = 0; i < curve_directions.cols(); ++i) {
    const Vector vol = multipliers.cwiseProduct(curve_directions.col(i));
    drift += vol.cwiseProduct(cumulative_integral(vol, tenors));
  }
  return scale * scale * drift;
}

Vector hjm_foreign_drift(const Vector& multipliers, const Matrix& curve_directions, const Vector& deltas,
                         double scale, const std::vector<double>& tenors) {
  if (deltas.size() != curve_directions.cols())
    raise(Errc::LoadingCountMismatch, "need one FX loading per driver: " + std::to_string(deltas.size()) + " vs " +
                                          std::to_string(curve_directions.cols()));
  Vector drift = hjm_domestic_drift(multipliers, curve_directions, scale, tenors);
  for (Index i = 0; i < curve_directions.cols(); ++i) {
    const Vector vol = multipliers.cwiseProduct(curve_directions.col(i));
    drift -= scale * deltas(i) * vol;
  }
  return drift;
}

double fx_drift(double domestic_short_rate, double foreign_short_rate, const Vector& deltas) {
  return domestic_short_rate - foreign_short_rate - 0.5 * deltas.squaredNorm();
}

} // namespace scengen
