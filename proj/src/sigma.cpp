#include "scengen/sigma.hpp"

#include <cmath>

namespace scengen {

GeometricSigma::GeometricSigma(const FactorLayout& layout, double rate_floor) : rate_floor_(rate_floor) {
  if (!(rate_floor > 0.0)) raise(Errc::BadConfig, "rate floor must be strictly positive");
  is_rate_.resize(static_cast<std::size_t>(layout.factor_count()));
  for (Index j = 0; j < layout.factor_count(); ++j)
    is_rate_[static_cast<std::size_t>(j)] = layout.factor(j).type == FactorType::ForwardRate;
}

GeometricSigma GeometricSigma::identity(const FactorLayout& layout) {
  GeometricSigma sigma;
  sigma.is_rate_.assign(static_cast<std::size_t>(layout.factor_count()), false);
  sigma.all_identity_ = true;
  return sigma;
}

Vector GeometricSigma::multipliers(const Vector& state) const {
  if (state.size() != factor_count())
    raise(Errc::LengthMismatch, "state length does not match sigma factor count");
  Vector m = Vector::Ones(state.size());
  if (all_identity_) return m;
  for (Index j = 0; j < state.size(); ++j)
    if (is_rate_[static_cast<std::size_t>(j)]) m(j) = std::sqrt(std::max(state(j), rate_floor_));
  return m;
}

Vector GeometricSigma::apply(const Vector& state, const Vector& v) const {
  if (v.size() != factor_count()) raise(Errc::LengthMismatch, "vector length does not match sigma factor count");
  return multipliers(state).cwiseProduct(v);
}

Vector GeometricSigma::inverse_apply(const Vector& state, const Vector& v) const {
  if (v.size() != factor_count()) raise(Errc::LengthMismatch, "vector length does not match sigma factor count");
  return v.cwiseQuotient(multipliers(state));
}

} // namespace scengen
