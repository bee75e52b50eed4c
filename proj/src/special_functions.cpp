#include "levelflow/special_functions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "levelflow/errors.hpp"

namespace levelflow {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Godfrey's coefficients for the Lanczos approximation with g = 607/128.
constexpr std::array<double, 14> kLanczos = {
    57.1562356658629235,     -59.5979603554754912,    14.1360979747417471,
    -0.491913816097620199,   .339946499848118887e-4,  .465236289270485756e-4,
    -.983744753048795646e-4, .158088703224912494e-3,  -.210264441724104883e-3,
    .217439618115212643e-3,  -.164318106536763890e-3, .844182239838527433e-4,
    -.261908384015814087e-4, .368991826595316234e-5};

void check_bessel_args(double order, double z) {
  if (!(order >= 0.0)) throw DomainError("bessel_i_log", "order must be >= 0");
  if (order > kMaxBesselOrder) throw DomainError("bessel_i_log", "order must be <= 10");
  if (!(z >= 0.0)) throw DomainError("bessel_i_log", "argument must be >= 0");
}

}  // namespace

double ln_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("ln_gamma", "argument must be > 0");
  double y = x;
  double tmp = x + 5.24218750000000000;
  tmp = (x + 0.5) * std::log(tmp) - tmp;
  double ser = 0.999999999999997092;
  for (double c : kLanczos) ser += c / ++y;
  return tmp + std::log(2.5066282746310005 * ser / x);
}

double bessel_i_crossover(double order) { return 30.0 + order * order; }

namespace {

double series_unchecked(double order, double z) {
  if (z == 0.0) {
    if (order == 0.0) return 0.0;
    return order > 0.0 ? kNegInf : std::numeric_limits<double>::infinity();
  }
  // Terms of sum_k (z/2)^(2k+order) / (k! Gamma(k+order+1)), relative to k = 0.
  const double quarter_z2 = 0.25 * z * z;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 100000; ++k) {
    term *= quarter_z2 / (k * (k + order));
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  const double log_leading = order * std::log(0.5 * z) - ln_gamma(order + 1.0);
  return log_leading + std::log(sum) - z;
}

double asymptotic_unchecked(double order, double z) {
  const double mu = 4.0 * order * order;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 1000; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (8.0 * k * z);
    // Divergent tail: stop at the smallest term.
    if (odd * odd > mu && std::abs(next) >= std::abs(term)) break;
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return std::log(sum) - 0.5 * std::log(2.0 * std::numbers::pi * z);
}

}  // namespace

double bessel_i_scaled_log_series(double order, double z) {
  check_bessel_args(order, z);
  return series_unchecked(order, z);
}

double bessel_i_scaled_log_asymptotic(double order, double z) {
  check_bessel_args(order, z);
  if (z == 0.0) throw DomainError("bessel_i_log", "asymptotic branch needs z > 0");
  return asymptotic_unchecked(order, z);
}

namespace detail {

double bessel_i_scaled_log_extended(double order, double z) {
  if (!(order > -1.0)) throw DomainError("bessel_i_log", "order must be > -1");
  if (order > kMaxBesselOrder) throw DomainError("bessel_i_log", "order must be <= 10");
  if (!(z >= 0.0)) throw DomainError("bessel_i_log", "argument must be >= 0");
  if (z < bessel_i_crossover(order)) return series_unchecked(order, z);
  return asymptotic_unchecked(order, z);
}

}  // namespace detail

double bessel_i_scaled_log(double order, double z) {
  check_bessel_args(order, z);
  if (z < bessel_i_crossover(order)) return bessel_i_scaled_log_series(order, z);
  return bessel_i_scaled_log_asymptotic(order, z);
}

LogScaledValue bessel_i_log(double order, double z) {
  const double scaled = bessel_i_scaled_log(order, z);
  return {scaled == kNegInf ? kNegInf : scaled + z};
}

double regularized_lower_gamma(double a, double x) {
  constexpr const char* kOp = "regularized_lower_gamma";
  if (!(a > 0.0)) throw DomainError(kOp, "shape must be > 0");
  if (!(x >= 0.0)) throw DomainError(kOp, "argument must be >= 0");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;

  const double log_prefactor = -x + a * std::log(x) - ln_gamma(a);
  constexpr int kMaxIter = 100000;
  constexpr double kEps = 1e-16;

  if (x < a + 1.0) {
    double ap = a;
    double del = 1.0 / a;
    double sum = del;
    for (int n = 0; n < kMaxIter; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * kEps) {
        return std::min(1.0, sum * std::exp(log_prefactor));
      }
    }
    throw NumericalError(kOp, "series did not converge");
  }

  // Modified Lentz evaluation of the continued fraction for Q(a, x).
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 4.0 * kEps) {
      return std::max(0.0, 1.0 - std::exp(log_prefactor) * h);
    }
  }
  throw NumericalError(kOp, "continued fraction did not converge");
}

}  // namespace levelflow
