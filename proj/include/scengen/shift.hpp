#pragma once

#include <vector>

#include "scengen/error.hpp"
#include "scengen/types.hpp"

namespace scengen {

/// Linear interpolation of a curve sampled on the tenor grid, flat beyond
/// both ends.
double interpolate_curve(const ConstVectorRef& curve, const std::vector<double>& tenors, double x);

/// Shift semigroup on the tenor grid: result at tenor x is the input curve
/// read at x + t (Musiela d/dx term applied exactly, not by differencing).
Vector apply_shift(const ConstVectorRef& curve, const std::vector<double>& tenors, double t);

/// Trapezoid integral of the interpolated curve from 0 to x.
double integrate_curve(const ConstVectorRef& curve, const std::vector<double>& tenors, double x);

/// Running trapezoid integral evaluated at every grid tenor.
Vector cumulative_integral(const ConstVectorRef& curve, const std::vector<double>& tenors);

} // namespace scengen
