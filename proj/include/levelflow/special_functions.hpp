#pragma once

#include <cmath>
#include <limits>

namespace levelflow {

/// Natural logarithm of a positive quantity. A zero quantity is represented
/// by log_magnitude = -inf.
struct LogScaledValue {
  double log_magnitude = 0.0;

  double value() const { return std::exp(log_magnitude); }
  bool is_zero() const { return log_magnitude == -std::numeric_limits<double>::infinity(); }
};

/// ln Gamma(x) for x > 0 (Lanczos-type rational approximation).
double ln_gamma(double x);

/// Largest supported Bessel order. Beyond it the series overflows before the
/// asymptotic branch takes over.
inline constexpr double kMaxBesselOrder = 10.0;

/// log I_order(z) for 0 <= order <= 10, z >= 0. Dispatches between the power
/// series and the large-argument expansion.
LogScaledValue bessel_i_log(double order, double z);

/// log(exp(-z) I_order(z)); the form used wherever I appears next to
/// Gaussian factors, so the e^z growth cancels analytically.
double bessel_i_scaled_log(double order, double z);

// The two evaluation branches, exposed for crossover testing.
double bessel_i_scaled_log_series(double order, double z);
double bessel_i_scaled_log_asymptotic(double order, double z);

/// Argument above which bessel_i_log switches to the asymptotic expansion.
double bessel_i_crossover(double order);

/// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
double regularized_lower_gamma(double a, double x);

namespace detail {
/// log(exp(-z) I_order(z)) for order > -1, without the public order >= 0
/// contract. Needed by the kernel for 1 < n < 2, where the order is negative.
double bessel_i_scaled_log_extended(double order, double z);
}  // namespace detail

}  // namespace levelflow
