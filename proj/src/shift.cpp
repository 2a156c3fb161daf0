#include "scengen/shift.hpp"

#include <algorithm>

namespace scengen {

double interpolate_curve(const ConstVectorRef& curve, const std::vector<double>& tenors, double x) {
  const Index n = curve.size();
  if (n == 0 || static_cast<std::size_t>(n) != tenors.size())
    raise(Errc::LengthMismatch, "curve and tenor grid sizes differ");
  if (x <= tenors.front()) return curve(0);
  if (x >= tenors.back()) return curve(n - 1);
  const auto it = std::upper_bound(tenors.begin(), tenors.end(), x);
  const Index hi = static_cast<Index>(it - tenors.begin());
  const Index lo = hi - 1;
  const double w = (x - tenors[static_cast<std::size_t>(lo)]) /
                   (tenors[static_cast<std::size_t>(hi)] - tenors[static_cast<std::size_t>(lo)]);
  return (1.0 - w) * curve(lo) + w * curve(hi);
}

Vector apply_shift(const ConstVectorRef& curve, const std::vector<double>& tenors, double t) {
  if (t < 0.0) raise(Errc::NegativeTime, "shift time must be nonnegative");
  if (curve.size() == 0) return Vector();
  if (t == 0.0) return curve;
  Vector shifted(curve.size());
  for (Index i = 0; i < curve.size(); ++i)
    shifted(i) = interpolate_curve(curve, tenors, tenors[static_cast<std::size_t>(i)] + t);
  return shifted;
}

Vector cumulative_integral(const ConstVectorRef& curve, const std::vector<double>& tenors) {
  const Index n = curve.size();
  if (n == 0 || static_cast<std::size_t>(n) != tenors.size())
    raise(Errc::LengthMismatch, "curve and tenor grid sizes differ");
  Vector integral(n);
  integral(0) = curve(0) * tenors[0];  // flat from 0 to the first tenor
  for (Index i = 1; i < n; ++i) {
    const double dx = tenors[static_cast<std::size_t>(i)] - tenors[static_cast<std::size_t>(i - 1)];
    integral(i) = integral(i - 1) + 0.5 * dx * (curve(i) + curve(i - 1));
  }
  return integral;
}

double integrate_curve(const ConstVectorRef& curve, const std::vector<double>& tenors, double x) {
  const Index n = curve.size();
  if (n == 0 || static_cast<std::size_t>(n) != tenors.size())
    raise(Errc::LengthMismatch, "curve and tenor grid sizes differ");
  if (x <= 0.0) return 0.0;
  if (x <= tenors.front()) return curve(0) * x;
  const Vector integral = cumulative_integral(curve, tenors);
  if (x >= tenors.back()) return integral(n - 1) + curve(n - 1) * (x - tenors.back());
  const auto it = std::upper_bound(tenors.begin(), tenors.end(), x);
  const Index hi = static_cast<Index>(it - tenors.begin());
  const Index lo = hi - 1;
  const double fx = interpolate_curve(curve, tenors, x);
  return integral(lo) + 0.5 * (x - tenors[static_cast<std::size_t>(lo)]) * (curve(lo) + fx);
}

} // namespace scengen
