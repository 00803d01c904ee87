#pragma once

#include <functional>

namespace mpsim {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
  int intervals = 0;
};

/// Globally adaptive Gauss-Kronrod 7/15 on [a, b].  Stops once the summed
/// error estimate is below max(abs_tol, rel_tol |value|); throws a
/// nonconvergence error when max_intervals is exhausted first.
QuadratureResult gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                               double rel_tol = 1e-12, double abs_tol = 0.0, int max_intervals = 4000);

/// Integral over [0, inf) through r = tan(theta).  The integrand must decay
/// fast enough that f(tan t) sec^2 t -> 0 as t -> pi/2.
QuadratureResult integrate_half_line(const std::function<double(double)>& f, double rel_tol = 1e-12,
                                     double abs_tol = 0.0, int max_intervals = 4000);

}  // namespace mpsim
