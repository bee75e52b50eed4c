#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "levelflow/random.hpp"
#include "levelflow/special_functions.hpp"
#include "levelflow/spacing_distributions.hpp"

namespace levelflow {

/// p_lag(start, end): density of X_lag = end given X_0 = start.
struct KernelQuery {
  RepulsionFamily family;
  double lag;    // fictitious-time lag t > 0
  double start;  // y >= 0
  double end;    // x >= 0
};

/// Kernel evaluation needs Bessel order (n - 2) / 2 <= 10, so n <= 22;
/// DomainError above. The samplers have no such limit.
inline constexpr double kMaxKernelN = 2.0 * kMaxBesselOrder + 2.0;

double transition_log_density(const KernelQuery& query);
double transition_density(const KernelQuery& query);

/// Exact draw of X_lag given X_0 = start, through the noncentral
/// chi-squared representation X^2 = q G, G ~ Gamma(n/2 + K, 1),
/// K ~ Poisson(start^2 e^{-2 lag} / q), q = 1 - e^{-2 lag}.
double sample_transition(const RepulsionFamily& family, double lag, double start, Engine& rng);

std::vector<double> sample_transition_batch(const RepulsionFamily& family, double lag,
                                            double start, std::uint64_t seed,
                                            std::size_t count);
std::vector<double> sample_transition_batch_serial(const RepulsionFamily& family, double lag,
                                                   double start, std::uint64_t seed,
                                                   std::size_t count);

/// Stationary chain x_{k+1} ~ p_lag(x_k, .), x_0 drawn from the invariant law.
std::vector<double> exact_chain(const RepulsionFamily& family, double lag, std::size_t length,
                                Engine& rng);

/// E[X_lag^2] = n q / 2 + start^2 e^{-2 lag}.
double transition_second_moment(const RepulsionFamily& family, double lag, double start);
/// E[X_lag^power] by quadrature of the kernel.
double transition_moment(const RepulsionFamily& family, double lag, double start, double power);

/// Right end of the truncated integration domain for the kernel in x:
/// six units beyond both the start and the bulk sqrt(n/2) of the family.
double kernel_upper_limit(const RepulsionFamily& family, double start);

/// |int p_s(y,z) p_t(z,x) dz - p_{s+t}(y,x)|. Throws NumericalError when the
/// quadrature does not converge within `max_intervals` panels.
double chapman_kolmogorov_residual(const RepulsionFamily& family, double s, double t,
                                   double start, double end, int max_intervals = 4000);

/// sup over x in [0, 6] (step 0.01) of |p_t(y, x) - rho(x)|.
double long_time_limit_distance(const RepulsionFamily& family, double lag, double start);

/// CDF of p_lag(start, .) integrated panel by panel and interpolated with
/// cubic Hermite segments (the density supplies the slopes).
class TransitionCdf {
 public:
  TransitionCdf(const RepulsionFamily& family, double lag, double start, int panels = 2000);
  double operator()(double x) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> cdf_;
  std::vector<double> pdf_;
};

/// Kernel values on a (lag, start, end) grid, end varying fastest.
struct KernelTable {
  std::vector<double> lags;
  std::vector<double> starts;
  std::vector<double> ends;
  std::vector<double> values;

  double at(std::size_t i_lag, std::size_t i_start, std::size_t i_end) const {
    return values[(i_lag * starts.size() + i_start) * ends.size() + i_end];
  }
};

KernelTable transition_density_table(const RepulsionFamily& family, std::span<const double> lags,
                                     std::span<const double> starts,
                                     std::span<const double> ends);
KernelTable transition_density_table_serial(const RepulsionFamily& family,
                                            std::span<const double> lags,
                                            std::span<const double> starts,
                                            std::span<const double> ends);

}  // namespace levelflow
