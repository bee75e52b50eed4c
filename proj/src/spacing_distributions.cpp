#include "levelflow/spacing_distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "levelflow/errors.hpp"
#include "levelflow/special_functions.hpp"

namespace levelflow {

namespace {

constexpr double kPi = std::numbers::pi;

void require_nonnegative(std::string_view op, double x) {
  if (!(x >= 0.0)) throw DomainError(op, "argument must be >= 0");
}

template <typename Fill>
std::vector<double> blocked_draws(std::size_t count, bool parallel, Fill fill) {
  std::vector<double> out(count);
  const auto blocks = static_cast<std::int64_t>((count + kSampleBlock - 1) / kSampleBlock);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::int64_t b = 0; b < blocks; ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kSampleBlock;
    const std::size_t end = std::min(count, begin + kSampleBlock);
    fill(static_cast<std::uint64_t>(b), begin, end, out);
  }
  return out;
}

}  // namespace

RepulsionFamily::RepulsionFamily(double n, double diffusion) : n_(n), diffusion_(diffusion) {
  if (!(n > 1.0) || !std::isfinite(n)) {
    throw DomainError("RepulsionFamily", "family index n must be > 1");
  }
  if (!(diffusion > 0.0)) throw DomainError("RepulsionFamily", "diffusion must be > 0");
}

RepulsionFamily family_of(SurmiseClass surmise) {
  switch (surmise) {
    case SurmiseClass::GOE: return RepulsionFamily(2.0);
    case SurmiseClass::GUE: return RepulsionFamily(3.0);
    case SurmiseClass::Ginibre: return RepulsionFamily(4.0);
    case SurmiseClass::GSE: return RepulsionFamily(5.0);
  }
  throw DomainError("family_of", "unknown surmise class");
}

std::string_view to_string(SurmiseClass surmise) {
  switch (surmise) {
    case SurmiseClass::GOE: return "GOE";
    case SurmiseClass::GUE: return "GUE";
    case SurmiseClass::Ginibre: return "Ginibre";
    case SurmiseClass::GSE: return "GSE";
  }
  return "?";
}

double invariant_log_density(const RepulsionFamily& family, double x) {
  require_nonnegative("invariant_density", x);
  if (x == 0.0) return -std::numeric_limits<double>::infinity();
  const double n = family.n();
  return std::log(2.0) - ln_gamma(0.5 * n) + (n - 1.0) * std::log(x) - x * x;
}

double invariant_density(const RepulsionFamily& family, double x) {
  return std::exp(invariant_log_density(family, x));
}

double invariant_cdf(const RepulsionFamily& family, double x) {
  require_nonnegative("invariant_cdf", x);
  return regularized_lower_gamma(0.5 * family.n(), x * x);
}

double surmise_density(SurmiseClass surmise, double s) {
  require_nonnegative("surmise_density", s);
  const double s2 = s * s;
  switch (surmise) {
    case SurmiseClass::GOE:
      return s * (kPi / 2.0) * std::exp(-s2 * kPi / 4.0);
    case SurmiseClass::GUE:
      // 4/pi in the exponent, the unit-mean companion of the 32/pi^2 prefactor.
      return s2 * (32.0 / (kPi * kPi)) * std::exp(-4.0 * s2 / kPi);
    case SurmiseClass::Ginibre:
      return s2 * s * (81.0 * kPi * kPi / 128.0) * std::exp(-s2 * 9.0 * kPi / 16.0);
    case SurmiseClass::GSE:
      return s2 * s2 * (262144.0 / (729.0 * kPi * kPi * kPi)) *
             std::exp(-s2 * 64.0 / (9.0 * kPi));
  }
  throw DomainError("surmise_density", "unknown surmise class");
}

double mean_of_invariant(const RepulsionFamily& family) {
  const double n = family.n();
  return std::exp(ln_gamma(0.5 * (n + 1.0)) - ln_gamma(0.5 * n));
}

double rescale_to_unit_mean(const RepulsionFamily& family, double s) {
  require_nonnegative("rescale_to_unit_mean", s);
  const double m = mean_of_invariant(family);
  return m * invariant_density(family, m * s);
}

double unit_mean_cdf(const RepulsionFamily& family, double s) {
  require_nonnegative("unit_mean_cdf", s);
  return invariant_cdf(family, mean_of_invariant(family) * s);
}

double sample_invariant(const RepulsionFamily& family, Engine& rng) {
  std::gamma_distribution<double> gamma(0.5 * family.n(), 1.0);
  return std::sqrt(gamma(rng));
}

namespace {

std::vector<double> invariant_batch(const RepulsionFamily& family, std::uint64_t seed,
                                    std::size_t count, bool parallel) {
  return blocked_draws(count, parallel,
                       [&](std::uint64_t block, std::size_t begin, std::size_t end,
                           std::vector<double>& out) {
                         Engine rng = make_stream(seed, block);
                         std::gamma_distribution<double> gamma(0.5 * family.n(), 1.0);
                         for (std::size_t i = begin; i < end; ++i) out[i] = std::sqrt(gamma(rng));
                       });
}

}  // namespace

std::vector<double> sample_invariant_batch(const RepulsionFamily& family,
                                           std::uint64_t seed, std::size_t count) {
  return invariant_batch(family, seed, count, true);
}

std::vector<double> sample_invariant_batch_serial(const RepulsionFamily& family,
                                                  std::uint64_t seed, std::size_t count) {
  return invariant_batch(family, seed, count, false);
}

double forward_drift(const RepulsionFamily& family, double x) {
  if (!(x > 0.0)) {
    throw DomainError("forward_drift", "drift is singular at x <= 0");
  }
  return family.beta() / (2.0 * x) - x;
}

double drift_from_density(const std::function<double(double)>& density,
                          double diffusion, double x) {
  constexpr std::string_view kOp = "drift_from_density";
  if (!(x > 0.0)) throw DomainError(kOp, "x must be > 0");
  if (!(diffusion > 0.0)) throw DomainError(kOp, "diffusion must be > 0");
  const double h = derivative_step(x);
  // Five-point stencil: the three-point rule at this step misses 1e-6 for x ~ 4.
  const double samples[5] = {density(x - 2.0 * h), density(x - h), density(x), density(x + h),
                             density(x + 2.0 * h)};
  for (double v : samples) {
    if (!(v > 0.0)) throw DomainError(kOp, "density must be positive on the stencil");
  }
  double r[5];
  for (int i = 0; i < 5; ++i) r[i] = std::sqrt(samples[i]);
  const double slope = (r[0] - 8.0 * r[1] + 8.0 * r[3] - r[4]) / (12.0 * h);
  return 2.0 * diffusion * slope / r[2];
}

}  // namespace levelflow
