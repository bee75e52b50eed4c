#include "levelflow/spectral_statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "levelflow/errors.hpp"
#include "levelflow/quadrature.hpp"
#include "levelflow/special_functions.hpp"

namespace levelflow {

SpacingSample::SpacingSample(std::vector<double> spacings, bool normalized)
    : spacings_(std::move(spacings)), normalized_(normalized) {
  if (spacings_.empty()) throw DomainError("SpacingSample", "empty sample");
  for (std::size_t i = 0; i < spacings_.size(); ++i) {
    if (!(spacings_[i] > 0.0) || !std::isfinite(spacings_[i])) {
      throw DomainError("SpacingSample", "entry " + std::to_string(i) + " is not a positive finite value");
    }
  }
}

double SpacingSample::mean() const {
  return std::accumulate(spacings_.begin(), spacings_.end(), 0.0) / static_cast<double>(spacings_.size());
}

SpacingSample SpacingSample::unit_mean() const {
  const double m = mean();
  std::vector<double> out(spacings_);
  for (double& s : out) s /= m;
  return SpacingSample(std::move(out), true);
}

LevelLadder ladder_from_spacings(const SpacingSample& sample, double origin) {
  LevelLadder ladder;
  ladder.spacings = sample.spacings();
  ladder.levels.resize(sample.size() + 1);
  ladder.levels[0] = origin;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    ladder.levels[i + 1] = ladder.levels[i] + sample.spacings()[i];
    if (!(ladder.levels[i + 1] > ladder.levels[i])) {
      throw NumericalError("ladder_from_spacings", "spacing " + std::to_string(i) +
                                                       " is below the resolution of the level");
    }
  }
  return ladder;
}

SpacingSample spacings_from_levels(std::span<const double> levels, bool normalize) {
  if (levels.size() < 2) throw DomainError("spacings_from_levels", "need at least two levels");
  std::vector<double> gaps(levels.size() - 1);
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (!(levels[i] > levels[i - 1])) {
      throw DomainError("spacings_from_levels", "levels not strictly ascending at index " + std::to_string(i));
    }
    gaps[i - 1] = levels[i] - levels[i - 1];
  }
  SpacingSample sample(std::move(gaps));
  return normalize ? sample.unit_mean() : sample;
}

SpacingSample spacings_from_levels(const LevelLadder& ladder, bool normalize) {
  SpacingSample sample(ladder.spacings);
  return normalize ? sample.unit_mean() : sample;
}

LevelLadder synthetic_ladder(const RepulsionFamily& family, std::size_t count, std::uint64_t seed,
                             double origin) {
  if (count == 0) throw DomainError("synthetic_ladder", "count must be >= 1");
  return ladder_from_spacings(SpacingSample(sample_invariant_batch(family, seed, count)), origin);
}

namespace {

constexpr double kKsCoefficient = 1.628;

KsResult finish_ks(double statistic, double effective_n, std::size_t smallest) {
  KsResult r;
  r.statistic = statistic;
  r.critical_value = kKsCoefficient / std::sqrt(effective_n);
  r.conclusive = smallest >= kMinConclusiveSample;
  r.pass = r.conclusive && statistic < r.critical_value;
  return r;
}

}  // namespace

KsResult ks_statistic(std::span<const double> sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw DomainError("ks_statistic", "empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return finish_ks(d, n, sorted.size());
}

KsResult ks_statistic(const SpacingSample& sample, const std::function<double(double)>& cdf) {
  return ks_statistic(std::span<const double>(sample.spacings()), cdf);
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("ks_two_sample", "empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return finish_ks(d, n * m / (n + m), std::min(x.size(), y.size()));
}

ErgodicityReport ergodicity_check(const RepulsionFamily& family, std::span<const double> chain,
                                  const std::function<double(double)>& observable) {
  constexpr std::string_view kOp = "ergodicity_check";
  if (chain.size() < kMinChainLength) throw ConfigError(kOp, "chain must hold at least 10^4 steps");

  ErgodicityReport r;
  const std::size_t n = chain.size();
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = observable(chain[i]);
  r.time_average = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(n);

  // Batch means with floor(sqrt(n)) batches; a remainder at the front is dropped.
  const auto batches = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  const std::size_t size = n / batches;
  const std::size_t skip = n - batches * size;
  const double used = static_cast<double>(batches * size);
  double grand = 0.0;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    const auto first = values.begin() + static_cast<std::ptrdiff_t>(skip + b * size);
    means[b] = std::accumulate(first, first + static_cast<std::ptrdiff_t>(size), 0.0) / static_cast<double>(size);
    grand += means[b];
  }
  grand /= static_cast<double>(batches);
  double between = 0.0;
  for (double m : means) between += (m - grand) * (m - grand);
  between /= static_cast<double>(batches - 1);
  const double long_run_variance = static_cast<double>(size) * between;
  r.standard_error = std::sqrt(long_run_variance / used);
  r.batches = batches;

  double variance = 0.0;
  for (std::size_t i = skip; i < n; ++i) variance += (values[i] - grand) * (values[i] - grand);
  variance /= used - 1.0;
  r.autocorrelation_time = variance > 0.0 ? 0.5 * long_run_variance / variance : 0.0;
  // Batch means cannot see correlations longer than a batch, so a batch
  // shorter than 10 autocorrelation times also marks the chain as short.
  r.short_chain = static_cast<double>(n) < 50.0 * r.autocorrelation_time ||
                  static_cast<double>(size) < 10.0 * r.autocorrelation_time;

  QuadratureOptions opts;
  opts.abs_tol = 1e-12;
  opts.rel_tol = 1e-10;
  opts.initial_panels = 100;
  opts.max_intervals = 20000;
  const auto q = integrate([&](double x) { return x > 0.0 ? observable(x) * invariant_density(family, x) : 0.0; },
                           0.0, std::max(10.0, std::sqrt(0.5 * family.n()) + 8.0), opts);
  if (!q.converged) throw NumericalError(kOp, "ensemble average quadrature did not converge");
  r.ensemble_average = q.value;
  r.discrepancy_sigmas =
      r.standard_error > 0.0 ? std::abs(r.time_average - r.ensemble_average) / r.standard_error : 0.0;
  return r;
}

namespace {

struct SufficientStats {
  double count;
  double sum_sq;
  double sum_log;
};

SufficientStats stats_of(const SpacingSample& sample) {
  SufficientStats s{static_cast<double>(sample.size()), 0.0, 0.0};
  for (double x : sample.spacings()) {
    s.sum_sq += x * x;
    s.sum_log += std::log(x);
  }
  return s;
}

double log_likelihood(const SufficientStats& s, double n, double scale) {
  return s.count * (std::log(2.0) - ln_gamma(0.5 * n) - n * std::log(scale)) + (n - 1.0) * s.sum_log -
         s.sum_sq / (scale * scale);
}

double profile_scale(const SufficientStats& s, double n) { return std::sqrt(2.0 * s.sum_sq / (n * s.count)); }

double profile(const SufficientStats& s, double n) { return log_likelihood(s, n, profile_scale(s, n)); }

}  // namespace

double family_log_likelihood(const SpacingSample& sample, double n, double scale) {
  if (!(n > 1.0) || !(scale > 0.0)) throw DomainError("family_log_likelihood", "need n > 1 and scale > 0");
  return log_likelihood(stats_of(sample), n, scale);
}

FamilyFit mle_fit_family(const SpacingSample& sample) {
  constexpr std::string_view kOp = "mle_fit_family";
  if (sample.size() < kMinConclusiveSample) throw DomainError(kOp, "need at least 100 spacings");
  const auto [lo, hi] = std::minmax_element(sample.spacings().begin(), sample.spacings().end());
  if (*lo == *hi) throw DomainError(kOp, "sample has zero variance");

  const SufficientStats s = stats_of(sample);
  // Coarse scan, then Brent on the bracketing cell.
  constexpr double kLow = 1.0 + 1e-6;
  constexpr double kStep = 0.05;
  double best_n = kLow;
  double best = profile(s, kLow);
  for (double n = 1.05; n <= kFitMaxN + 1e-12; n += kStep) {
    const double v = profile(s, n);
    if (v > best) {
      best = v;
      best_n = n;
    }
  }
  FamilyFit fit;
  fit.sample_size = sample.size();
  fit.n_hat = best_n;
  fit.log_likelihood = best;
  fit.converged = false;

  const double a = std::max(kLow, best_n - kStep);
  const double b = std::min(kFitMaxN, best_n + kStep);
  std::uintmax_t iterations = 200;
  const auto [arg, neg] = boost::math::tools::brent_find_minima(
      [&](double n) { return -profile(s, n); }, a, b, std::numeric_limits<double>::digits / 2, iterations);
  if (iterations < 200 && -neg >= best) {
    fit.n_hat = arg;
    fit.log_likelihood = -neg;
    fit.converged = true;
  }
  fit.scale_hat = profile_scale(s, fit.n_hat);
  return fit;
}

namespace {

SpacingSample goe_gaps(std::size_t count, std::uint64_t seed, bool parallel) {
  if (count == 0) throw DomainError("goe_2x2_spacing_oracle", "count must be >= 1");
  std::vector<double> gaps(count);
  const std::size_t blocks = (count + kSampleBlock - 1) / kSampleBlock;
  const auto total = static_cast<std::int64_t>(blocks);
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t blk = 0; blk < total; ++blk) {
    const auto b = static_cast<std::size_t>(blk);
    Engine rng = make_stream(seed, b);
    std::normal_distribution<double> diag(0.0, 1.0);
    std::normal_distribution<double> off(0.0, std::sqrt(0.5));
    const std::size_t end = std::min(count, (b + 1) * kSampleBlock);
    for (std::size_t i = b * kSampleBlock; i < end; ++i) {
      const double p = diag(rng);
      const double q = diag(rng);
      const double r = off(rng);
      gaps[i] = std::hypot(p - q, 2.0 * r);
    }
  }
  return SpacingSample(std::move(gaps)).unit_mean();
}

}  // namespace

SpacingSample goe_2x2_spacing_oracle(std::size_t count, std::uint64_t seed) {
  return goe_gaps(count, seed, true);
}

SpacingSample goe_2x2_spacing_oracle_serial(std::size_t count, std::uint64_t seed) {
  return goe_gaps(count, seed, false);
}

}  // namespace levelflow
