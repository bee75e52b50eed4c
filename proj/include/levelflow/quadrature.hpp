#pragma once

#include <functional>

namespace levelflow {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int intervals = 0;
  bool converged = false;
};

struct QuadratureOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-12;
  int max_intervals = 4000;
  /// Uniform pre-split of [a, b]; needed when the integrand is much
  /// narrower than the interval, so the first rule cannot miss it.
  int initial_panels = 1;
};

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature on [a, b].
/// Bisects the interval with the largest error estimate until the summed
/// estimate drops below max(abs_tol, rel_tol * |value|).
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureOptions& options = {});

}  // namespace levelflow
