#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

namespace zerostats {

// Adaptive Gauss-Kronrod (15-point) with interval bisection. a and b may be
// infinite; tol is the relative termination target on the local error
// estimate.
template <typename F>
double integrate(F&& f, double a, double b, double tol = 1e-10,
                 unsigned max_depth = 18) {
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      std::forward<F>(f), a, b, max_depth, tol);
}

// Integrate over [a, b] split at the given interior breakpoints (poles or
// peaks the adaptive refinement should not have to discover on its own).
template <typename F>
double integrate_split(F&& f, const std::vector<double>& knots, double tol = 1e-10,
                       unsigned max_depth = 18) {
  double total = 0.0;
  for (size_t i = 0; i + 1 < knots.size(); ++i)
    total += integrate(f, knots[i], knots[i + 1], tol, max_depth);
  return total;
}

}  // namespace zerostats
