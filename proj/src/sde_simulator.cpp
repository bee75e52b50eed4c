#include "levelflow/sde_simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "levelflow/errors.hpp"
#include "levelflow/transition_kernel.hpp"

namespace levelflow {

void PathConfig::validate() const {
  constexpr std::string_view kOp = "simulate_path";
  if (!(dt > 0.0)) throw ConfigError(kOp, "dt must be > 0");
  if (dt > kMaxTimeStep) throw ConfigError(kOp, "dt must not exceed 0.1");
  if (steps == 0) throw ConfigError(kOp, "steps must be >= 1");
  if (!(x0 > 0.0)) throw ConfigError(kOp, "x0 must be > 0");
}

double advance(double beta, Scheme scheme, double x, double dt, double dw) {
  if (beta == 0.0) {
    return scheme == Scheme::SemiImplicit ? (x + dw) / (1.0 + dt) : x - x * dt + dw;
  }
  if (scheme == Scheme::ExplicitReflect) {
    double next = x + (beta / (2.0 * x) - x) * dt + dw;
    if (next <= 0.0) next = -next;
    if (next == 0.0) next = std::numeric_limits<double>::min();
    return next;
  }
  const double a = 1.0 + dt;
  const double b = x + dw;
  const double c = 0.5 * beta * dt;
  const double disc = b * b + 4.0 * a * c;
  if (!(disc >= 0.0)) throw NumericalError("simulate_path", "negative discriminant");
  const double root = std::sqrt(disc);
  // Cancellation-free form of the positive root for either sign of b.
  const double next = b >= 0.0 ? (b + root) / (2.0 * a) : 2.0 * c / (root - b);
  if (!(next > 0.0)) throw NumericalError("simulate_path", "non-positive implicit root");
  return next;
}

namespace {

void check_beta(double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw DomainError("simulate_path", "beta must be >= 0");
  }
}

bool in_envelope(double beta) { return beta == 0.0 || beta >= 1.0; }

}  // namespace

SamplePath simulate_path(double beta, const PathConfig& config, Engine& rng) {
  check_beta(beta);
  config.validate();
  SamplePath path;
  path.validated = in_envelope(beta);
  path.times.resize(config.steps + 1);
  path.values.resize(config.steps + 1);
  std::normal_distribution<double> noise(0.0, std::sqrt(config.dt));
  double x = config.x0;
  path.times[0] = 0.0;
  path.values[0] = x;
  for (std::size_t i = 1; i <= config.steps; ++i) {
    x = advance(beta, config.scheme, x, config.dt, noise(rng));
    path.times[i] = config.dt * static_cast<double>(i);
    path.values[i] = x;
  }
  return path;
}

SamplePath simulate_path(const RepulsionFamily& family, const PathConfig& config, Engine& rng) {
  return simulate_path(family.beta(), config, rng);
}

namespace {

EnsembleResult ensemble(double beta, const PathConfig& config, std::uint64_t seed,
                        std::size_t paths, std::span<const double> starts, bool parallel) {
  check_beta(beta);
  config.validate();
  if (!starts.empty() && starts.size() != paths) {
    throw ConfigError("simulate_path", "starts must hold one value per path");
  }
  EnsembleResult result;
  result.validated = in_envelope(beta);
  result.endpoints.resize(paths);
  std::vector<double> minima(paths);
  const auto count = static_cast<std::int64_t>(paths);
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t p = 0; p < count; ++p) {
    const auto idx = static_cast<std::size_t>(p);
    Engine rng = make_stream(seed, idx);
    std::normal_distribution<double> noise(0.0, std::sqrt(config.dt));
    double x = starts.empty() ? config.x0 : starts[idx];
    double lowest = x;
    for (std::size_t i = 0; i < config.steps; ++i) {
      x = advance(beta, config.scheme, x, config.dt, noise(rng));
      lowest = std::min(lowest, x);
    }
    result.endpoints[idx] = x;
    minima[idx] = lowest;
  }
  result.min_value = paths == 0 ? 0.0 : *std::min_element(minima.begin(), minima.end());
  return result;
}

struct Moments {
  double mean, mean_se, second, second_se;
};

Moments moments_of(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  double s1 = 0.0, s2 = 0.0, s4 = 0.0;
  for (double x : xs) {
    const double x2 = x * x;
    s1 += x;
    s2 += x2;
    s4 += x2 * x2;
  }
  const double m1 = s1 / n;
  const double m2 = s2 / n;
  const double var1 = std::max(0.0, m2 - m1 * m1) * n / (n - 1.0);
  const double var2 = std::max(0.0, s4 / n - m2 * m2) * n / (n - 1.0);
  return {m1, std::sqrt(var1 / n), m2, std::sqrt(var2 / n)};
}

}  // namespace

EnsembleResult simulate_ensemble(double beta, const PathConfig& config, std::uint64_t seed,
                                 std::size_t paths, std::span<const double> starts) {
  return ensemble(beta, config, seed, paths, starts, true);
}

EnsembleResult simulate_ensemble_serial(double beta, const PathConfig& config,
                                        std::uint64_t seed, std::size_t paths,
                                        std::span<const double> starts) {
  return ensemble(beta, config, seed, paths, starts, false);
}

std::vector<WeakErrorPoint> weak_error_curve(const RepulsionFamily& family, double x0, double t,
                                             std::span<const double> dts, std::size_t paths,
                                             std::uint64_t seed, Scheme scheme) {
  constexpr std::string_view kOp = "weak_error_curve";
  if (dts.empty()) throw ConfigError(kOp, "need at least one step size");
  if (paths < 2) throw ConfigError(kOp, "need at least two paths");
  if (!(t > 0.0)) throw ConfigError(kOp, "horizon must be > 0");

  const double fine = *std::min_element(dts.begin(), dts.end());
  const auto fine_steps = static_cast<std::size_t>(std::llround(t / fine));
  std::vector<std::size_t> ratio(dts.size());
  for (std::size_t l = 0; l < dts.size(); ++l) {
    PathConfig{dts[l], 1, scheme, x0}.validate();
    const double r = dts[l] / fine;
    const double steps = t / dts[l];
    if (std::abs(r - std::round(r)) > 1e-9 * r || std::abs(steps - std::round(steps)) > 1e-9 * steps) {
      throw ConfigError(kOp, "each dt must divide the horizon and be a multiple of the finest dt");
    }
    ratio[l] = static_cast<std::size_t>(std::llround(r));
  }

  const double beta = family.beta();
  const std::size_t levels = dts.size();
  std::vector<double> endpoints(levels * paths);
  const auto count = static_cast<std::int64_t>(paths);
#pragma omp parallel for schedule(static)
  for (std::int64_t p = 0; p < count; ++p) {
    const auto idx = static_cast<std::size_t>(p);
    Engine rng = make_stream(seed, idx);
    std::normal_distribution<double> noise(0.0, std::sqrt(fine));
    std::vector<double> state(levels, x0);
    std::vector<double> pending(levels, 0.0);
    for (std::size_t i = 1; i <= fine_steps; ++i) {
      const double dw = noise(rng);
      for (std::size_t l = 0; l < levels; ++l) {
        pending[l] += dw;
        if (i % ratio[l] == 0) {
          state[l] = advance(beta, scheme, state[l], dts[l], pending[l]);
          pending[l] = 0.0;
        }
      }
    }
    for (std::size_t l = 0; l < levels; ++l) endpoints[l * paths + idx] = state[l];
  }

  const double exact_mean = transition_moment(family, t, x0, 1.0);
  const double exact_second = transition_second_moment(family, t, x0);
  std::vector<WeakErrorPoint> curve;
  const auto push = [&](double dt, bool exact, std::span<const double> xs) {
    const Moments m = moments_of(xs);
    curve.push_back({dt, exact, m.mean, m.mean_se, m.second, m.second_se,
                     std::abs(m.mean - exact_mean), std::abs(m.second - exact_second)});
  };
  for (std::size_t l = 0; l < levels; ++l) {
    push(dts[l], false, std::span<const double>(endpoints).subspan(l * paths, paths));
  }
  // Baseline draws use a disjoint substream range.
  const auto exact = sample_transition_batch(family, t, x0, seed ^ 0x9e3779b97f4a7c15ull, paths);
  push(0.0, true, exact);
  return curve;
}

}  // namespace levelflow
