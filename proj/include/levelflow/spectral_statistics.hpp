#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "levelflow/spacing_distributions.hpp"

namespace levelflow {

/// Positive spacings. `normalized` marks unit empirical mean, which stands in
/// for unfolding: results on raw spectra are normalized, not unfolded.
class SpacingSample {
 public:
  /// DomainError on an empty sample or any entry <= 0 / non-finite.
  explicit SpacingSample(std::vector<double> spacings, bool normalized = false);

  const std::vector<double>& spacings() const { return spacings_; }
  std::size_t size() const { return spacings_.size(); }
  bool normalized() const { return normalized_; }
  double mean() const;
  SpacingSample unit_mean() const;

 private:
  std::vector<double> spacings_;
  bool normalized_;
};

/// Strictly ascending levels, kept together with the spacings that built
/// them so the ladder/spacing round trip is exact.
struct LevelLadder {
  std::vector<double> levels;
  std::vector<double> spacings;
};

LevelLadder ladder_from_spacings(const SpacingSample& sample, double origin = 0.0);

/// Consecutive differences of strictly ascending levels, optionally divided
/// by their mean. DomainError naming the first offending index otherwise.
SpacingSample spacings_from_levels(std::span<const double> levels, bool normalize = false);
/// Exact inverse of ladder_from_spacings.
SpacingSample spacings_from_levels(const LevelLadder& ladder, bool normalize = false);

/// Ladder of `count` stationary spacings of `family`.
LevelLadder synthetic_ladder(const RepulsionFamily& family, std::size_t count,
                             std::uint64_t seed, double origin = 0.0);

inline constexpr std::size_t kMinConclusiveSample = 100;

struct KsResult {
  double statistic = 0.0;
  double critical_value = 0.0;  // asymptotic 1% value, 1.628 / sqrt(n_eff)
  bool conclusive = false;      // n >= 100
  bool pass = false;            // statistic < critical_value; false when inconclusive
};

KsResult ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf);
KsResult ks_statistic(const SpacingSample& sample, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

struct ErgodicityReport {
  double time_average = 0.0;
  double ensemble_average = 0.0;
  double standard_error = 0.0;     // batch-means, autocorrelation adjusted
  double discrepancy_sigmas = 0.0; // |time - ensemble| / standard_error
  double autocorrelation_time = 0.0;  // integrated, in chain steps
  std::size_t batches = 0;
  /// Fewer than 50 autocorrelation times in the chain, or fewer than 10 in a batch.
  bool short_chain = false;
};

inline constexpr std::size_t kMinChainLength = 10'000;

/// Time average of `observable` along a stationary chain against its
/// average under the invariant density (quadrature on [0, max(10, sqrt(n/2) + 8)]).
/// ConfigError below 10^4 steps.
ErgodicityReport ergodicity_check(const RepulsionFamily& family, std::span<const double> chain,
                                  const std::function<double(double)>& observable);

struct FamilyFit {
  double n_hat = 0.0;
  double scale_hat = 0.0;
  double log_likelihood = 0.0;
  std::size_t sample_size = 0;
  bool converged = false;  // false: n_hat is the best scan point
};

inline constexpr double kFitMaxN = 12.0;

/// Maximum likelihood over n in (1, 12] and scale > 0 of the model
/// (1/s) rho_n(x/s). The scale has the closed-form profile
/// s^2 = 2 sum x^2 / (n N), leaving a one-dimensional search in n.
/// DomainError below 100 entries or for zero variance.
FamilyFit mle_fit_family(const SpacingSample& sample);

/// Log-likelihood of the model at (n, scale).
double family_log_likelihood(const SpacingSample& sample, double n, double scale);

/// Eigenvalue gaps of `count` 2x2 real symmetric matrices with diagonal
/// entries ~ N(0, 1) and off-diagonal ~ N(0, 1/2), rescaled to unit mean.
/// Block b of kSampleBlock matrices uses substream b.
SpacingSample goe_2x2_spacing_oracle(std::size_t count, std::uint64_t seed);
SpacingSample goe_2x2_spacing_oracle_serial(std::size_t count, std::uint64_t seed);

}  // namespace levelflow
