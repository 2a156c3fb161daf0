#pragma once

#include "scengen/layout.hpp"
#include "scengen/types.hpp"

namespace scengen {

/// State-dependent diagonal volatility factor. Forward-rate factors get a
/// sqrt(max(level, rate_floor)) multiplier so simulated rates cannot diffuse
/// through zero; log-FX factors get the identity. The floor keeps the map
/// invertible for any state.
class GeometricSigma {
public:
  GeometricSigma(const FactorLayout& layout, double rate_floor = 1e-4);

  /// Identity rule on every factor, for validation setups.
  static GeometricSigma identity(const FactorLayout& layout);

  Vector multipliers(const Vector& state) const;
  Vector apply(const Vector& state, const Vector& v) const;
  Vector inverse_apply(const Vector& state, const Vector& v) const;

  double rate_floor() const { return rate_floor_; }
  bool is_identity() const { return all_identity_; }
  Index factor_count() const { return static_cast<Index>(is_rate_.size()); }

private:
  GeometricSigma() = default;

  std::vector<bool> is_rate_;
  double rate_floor_ = 1e-4;
  bool all_identity_ = false;
};

} // namespace scengen
