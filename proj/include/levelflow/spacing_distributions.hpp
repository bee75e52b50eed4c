#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "levelflow/random.hpp"

namespace levelflow {

/// Member of the radial Ornstein-Uhlenbeck family, indexed by the real
/// parameter n > 1 (repulsion exponent beta = n - 1). The diffusion
/// coefficient D defaults to 1/2, the unit-noise convention of the SDE.
class RepulsionFamily {
 public:
  explicit RepulsionFamily(double n, double diffusion = 0.5);
  static RepulsionFamily from_beta(double beta) { return RepulsionFamily(beta + 1.0); }

  double n() const { return n_; }
  double beta() const { return n_ - 1.0; }
  /// Bessel order (n - 2) / 2 of the transition kernel.
  double alpha() const { return 0.5 * (n_ - 2.0); }
  double diffusion() const { return diffusion_; }

 private:
  double n_;
  double diffusion_;
};

enum class SurmiseClass { GOE, GUE, Ginibre, GSE };

/// GOE -> 2, GUE -> 3, Ginibre -> 4, GSE -> 5.
RepulsionFamily family_of(SurmiseClass surmise);
std::string_view to_string(SurmiseClass surmise);

/// (2 / Gamma(n/2)) x^(n-1) exp(-x^2).
double invariant_density(const RepulsionFamily& family, double x);
double invariant_log_density(const RepulsionFamily& family, double x);
/// P(n/2, x^2).
double invariant_cdf(const RepulsionFamily& family, double x);

/// Closed-form surmise P_beta(s) with unit mean.
double surmise_density(SurmiseClass surmise, double s);

/// Gamma((n+1)/2) / Gamma(n/2).
double mean_of_invariant(const RepulsionFamily& family);

/// Invariant density rescaled to unit mean: m * rho(m s).
double rescale_to_unit_mean(const RepulsionFamily& family, double s);
double unit_mean_cdf(const RepulsionFamily& family, double s);

/// sqrt(G) with G ~ Gamma(n/2, 1).
double sample_invariant(const RepulsionFamily& family, Engine& rng);

/// `count` stationary draws; block b of kSampleBlock draws uses substream b.
std::vector<double> sample_invariant_batch(const RepulsionFamily& family,
                                           std::uint64_t seed, std::size_t count);
std::vector<double> sample_invariant_batch_serial(const RepulsionFamily& family,
                                                  std::uint64_t seed, std::size_t count);

/// (n - 1) / (2x) - x.
double forward_drift(const RepulsionFamily& family, double x);

/// 2D (sqrt(rho))' / sqrt(rho) by a five-point central difference with
/// h = max(1e-5, 1e-4 x).
double drift_from_density(const std::function<double(double)>& density,
                          double diffusion, double x);

/// Finite-difference step used by drift_from_density and potential_from_drift.
inline double derivative_step(double x) { return x * 1e-4 > 1e-5 ? x * 1e-4 : 1e-5; }

}  // namespace levelflow
