#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "levelflow/random.hpp"
#include "levelflow/spacing_distributions.hpp"

namespace levelflow {

enum class Scheme {
  /// Euler-Maruyama step, negative proposals reflected through 0.
  ExplicitReflect,
  /// Drift taken at the new point: positive root of
  /// (1 + dt) x'^2 - (x + dW) x' - beta dt / 2 = 0.
  SemiImplicit,
};

inline constexpr double kMaxTimeStep = 0.1;

struct PathConfig {
  double dt = 1e-3;
  std::size_t steps = 1000;
  Scheme scheme = Scheme::SemiImplicit;
  double x0 = 1.0;

  double horizon() const { return dt * static_cast<double>(steps); }
  /// Throws ConfigError on dt <= 0, dt > kMaxTimeStep, steps == 0, x0 <= 0.
  void validate() const;
};

struct SamplePath {
  std::vector<double> times;
  std::vector<double> values;
  /// False for 0 < beta < 1, where the origin is attainable and neither
  /// scheme has been validated against the exact kernel.
  bool validated = true;
};

/// One step of dX = (beta / (2X) - X) dt + dW with increment `dw`.
/// beta = 0 is the classic Ornstein-Uhlenbeck update on the whole line.
double advance(double beta, Scheme scheme, double x, double dt, double dw);

SamplePath simulate_path(double beta, const PathConfig& config, Engine& rng);
SamplePath simulate_path(const RepulsionFamily& family, const PathConfig& config, Engine& rng);

struct EnsembleResult {
  std::vector<double> endpoints;
  /// Smallest value visited by any path at any step.
  double min_value = 0.0;
  bool validated = true;
};

/// Endpoints of `paths` independent paths; path p draws from substream p.
/// `starts`, when non-empty, overrides config.x0 per path.
EnsembleResult simulate_ensemble(double beta, const PathConfig& config, std::uint64_t seed,
                                 std::size_t paths, std::span<const double> starts = {});
EnsembleResult simulate_ensemble_serial(double beta, const PathConfig& config,
                                        std::uint64_t seed, std::size_t paths,
                                        std::span<const double> starts = {});

struct WeakErrorPoint {
  double dt = 0.0;  // 0 marks the exact-sampler baseline row
  bool exact = false;
  double mean = 0.0;
  double mean_se = 0.0;
  double second_moment = 0.0;
  double second_moment_se = 0.0;
  double mean_error = 0.0;           // |mean - E[X_t]|
  double second_moment_error = 0.0;  // |second_moment - E[X_t^2]|
};

/// Endpoint moment errors at each step size against the exact kernel
/// moments. All step sizes share one Brownian path per sample (the coarse
/// increments are sums of the finest ones). A final row holds the exact
/// sampler with the same number of draws.
std::vector<WeakErrorPoint> weak_error_curve(const RepulsionFamily& family, double x0, double t,
                                             std::span<const double> dts, std::size_t paths,
                                             std::uint64_t seed,
                                             Scheme scheme = Scheme::SemiImplicit);

}  // namespace levelflow
