#include "levelflow/transition_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levelflow/errors.hpp"
#include "levelflow/quadrature.hpp"
#include "levelflow/special_functions.hpp"

namespace levelflow {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// 1 - e^{-2t}, the variance scale of the underlying n-dimensional OU
// coordinates (per coordinate variance q / 2).
double spread(double lag) { return -std::expm1(-2.0 * lag); }

void check_lag(std::string_view op, double lag) {
  if (!(lag > 0.0)) throw DomainError(op, "lag must be > 0");
}

// Panels of roughly a quarter standard deviation, so that the first
// Gauss-Kronrod pass sees even the sharpest short-lag kernel.
int panels_for(double width, double length) {
  const double panel = 0.25 * std::sqrt(0.5 * width);
  return std::clamp(static_cast<int>(std::ceil(length / panel)), 1, 20000);
}

}  // namespace

double transition_log_density(const KernelQuery& query) {
  constexpr std::string_view kOp = "transition_density";
  check_lag(kOp, query.lag);
  const double x = query.end;
  const double y = query.start;
  if (!(x >= 0.0) || !(y >= 0.0)) throw DomainError(kOp, "start and end must be >= 0");
  if (query.family.n() > kMaxKernelN) throw DomainError(kOp, "family index n must be <= 22");
  if (x == 0.0) return kNegInf;

  const double n = query.family.n();
  const double alpha = query.family.alpha();
  const double q = spread(query.lag);
  const double mu = y * std::exp(-query.lag);  // mean-reverted start
  const double common = std::log(2.0) + (n - 1.0) * std::log(x) - std::log(q);

  const double z = 2.0 * x * mu / q;
  if (z < 1e-8) {
    // Leading series terms: (x mu)^{-alpha} I_alpha(z) -> q^{-alpha} (1 + z^2 / (4 (alpha + 1))) / Gamma(alpha + 1).
    return common - (x * x + mu * mu) / q - alpha * std::log(q) - ln_gamma(alpha + 1.0) +
           std::log1p(z * z / (4.0 * (alpha + 1.0)));
  }
  // exp(-(x^2 + mu^2)/q) I_alpha(z) = exp(-(x - mu)^2 / q) [e^{-z} I_alpha(z)].
  const double d = x - mu;
  return common - d * d / q - alpha * std::log(x * mu) +
         detail::bessel_i_scaled_log_extended(alpha, z);
}

double transition_density(const KernelQuery& query) {
  return std::exp(transition_log_density(query));
}

double sample_transition(const RepulsionFamily& family, double lag, double start, Engine& rng) {
  check_lag("sample_transition", lag);
  if (!(start >= 0.0)) throw DomainError("sample_transition", "start must be >= 0");
  const double q = spread(lag);
  const double mu = start * std::exp(-lag);
  long long k = 0;
  if (mu > 0.0) {
    std::poisson_distribution<long long> poisson(mu * mu / q);
    k = poisson(rng);
  }
  std::gamma_distribution<double> gamma(0.5 * family.n() + static_cast<double>(k), 1.0);
  double x = std::sqrt(q * gamma(rng));
  // A Gamma draw of exactly zero has probability zero but is representable.
  if (x == 0.0) x = std::numeric_limits<double>::min();
  return x;
}

namespace {

std::vector<double> transition_batch(const RepulsionFamily& family, double lag, double start,
                                     std::uint64_t seed, std::size_t count, bool parallel) {
  std::vector<double> out(count);
  const auto blocks = static_cast<std::int64_t>((count + kSampleBlock - 1) / kSampleBlock);
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::int64_t b = 0; b < blocks; ++b) {
    Engine rng = make_stream(seed, static_cast<std::uint64_t>(b));
    const std::size_t begin = static_cast<std::size_t>(b) * kSampleBlock;
    const std::size_t end = std::min(count, begin + kSampleBlock);
    for (std::size_t i = begin; i < end; ++i) out[i] = sample_transition(family, lag, start, rng);
  }
  return out;
}

}  // namespace

std::vector<double> sample_transition_batch(const RepulsionFamily& family, double lag,
                                            double start, std::uint64_t seed,
                                            std::size_t count) {
  return transition_batch(family, lag, start, seed, count, true);
}

std::vector<double> sample_transition_batch_serial(const RepulsionFamily& family, double lag,
                                                   double start, std::uint64_t seed,
                                                   std::size_t count) {
  return transition_batch(family, lag, start, seed, count, false);
}

std::vector<double> exact_chain(const RepulsionFamily& family, double lag, std::size_t length,
                                Engine& rng) {
  check_lag("exact_chain", lag);
  std::vector<double> chain;
  if (length == 0) return chain;
  chain.reserve(length);
  chain.push_back(sample_invariant(family, rng));
  while (chain.size() < length) chain.push_back(sample_transition(family, lag, chain.back(), rng));
  return chain;
}

double transition_second_moment(const RepulsionFamily& family, double lag, double start) {
  check_lag("transition_second_moment", lag);
  const double mu = start * std::exp(-lag);
  return 0.5 * family.n() * spread(lag) + mu * mu;
}

double kernel_upper_limit(const RepulsionFamily& family, double start) {
  return std::max(start, std::sqrt(0.5 * family.n())) + 6.0;
}

double transition_moment(const RepulsionFamily& family, double lag, double start, double power) {
  constexpr std::string_view kOp = "transition_moment";
  check_lag(kOp, lag);
  const double upper = kernel_upper_limit(family, start);
  QuadratureOptions options;
  options.initial_panels = panels_for(spread(lag), upper);
  const auto result = integrate(
      [&](double x) {
        return std::pow(x, power) * transition_density({family, lag, start, x});
      },
      0.0, upper, options);
  if (!result.converged) throw NumericalError(kOp, "quadrature did not converge");
  return result.value;
}

double chapman_kolmogorov_residual(const RepulsionFamily& family, double s, double t,
                                   double start, double end, int max_intervals) {
  constexpr std::string_view kOp = "chapman_kolmogorov_residual";
  check_lag(kOp, s);
  check_lag(kOp, t);
  const double upper = kernel_upper_limit(family, start);
  QuadratureOptions options;
  options.abs_tol = 1e-12;
  options.rel_tol = 1e-12;
  options.max_intervals = max_intervals;
  options.initial_panels = std::min(max_intervals, panels_for(spread(std::min(s, t)), upper));
  const auto result = integrate(
      [&](double z) {
        if (z == 0.0) return 0.0;
        return std::exp(transition_log_density({family, s, start, z}) +
                        transition_log_density({family, t, z, end}));
      },
      0.0, upper, options);
  if (!result.converged) throw NumericalError(kOp, "quadrature did not converge");
  return std::abs(result.value - transition_density({family, s + t, start, end}));
}

double long_time_limit_distance(const RepulsionFamily& family, double lag, double start) {
  check_lag("long_time_limit_distance", lag);
  double distance = 0.0;
  for (int i = 0; i <= 600; ++i) {
    const double x = 0.01 * i;
    const double gap =
        std::abs(transition_density({family, lag, start, x}) - invariant_density(family, x));
    distance = std::max(distance, gap);
  }
  return distance;
}

TransitionCdf::TransitionCdf(const RepulsionFamily& family, double lag, double start,
                             int panels) {
  constexpr std::string_view kOp = "TransitionCdf";
  check_lag(kOp, lag);
  if (panels < 2) throw ConfigError(kOp, "need at least 2 panels");
  const double q = spread(lag);
  const double mu = start * std::exp(-lag);
  const double reach = std::sqrt(q) * (std::sqrt(family.n()) + 10.0);
  const double lo = std::max(0.0, mu - reach);
  const double hi = mu + reach;

  const auto pdf = [&](double x) { return transition_density({family, lag, start, x}); };
  QuadratureOptions options;
  options.abs_tol = 1e-15;
  options.rel_tol = 1e-13;

  nodes_.resize(static_cast<std::size_t>(panels) + 1);
  cdf_.resize(nodes_.size());
  pdf_.resize(nodes_.size());
  double acc = lo > 0.0 ? integrate(pdf, 0.0, lo, options).value : 0.0;
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    nodes_[j] = lo + (hi - lo) * static_cast<double>(j) / panels;
    if (j > 0) {
      const auto piece = integrate(pdf, nodes_[j - 1], nodes_[j], options);
      if (!piece.converged) throw NumericalError(kOp, "panel quadrature did not converge");
      acc += piece.value;
    }
    cdf_[j] = acc;
    pdf_[j] = pdf(nodes_[j]);
  }
}

double TransitionCdf::operator()(double x) const {
  if (x <= nodes_.front()) return x <= 0.0 ? 0.0 : cdf_.front();
  if (x >= nodes_.back()) return std::min(1.0, cdf_.back());
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  const auto j = static_cast<std::size_t>(it - nodes_.begin()) - 1;
  const double w = nodes_[j + 1] - nodes_[j];
  const double u = (x - nodes_[j]) / w;
  const double u2 = u * u;
  const double u3 = u2 * u;
  const double h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
  const double h10 = u3 - 2.0 * u2 + u;
  const double h01 = -2.0 * u3 + 3.0 * u2;
  const double h11 = u3 - u2;
  return h00 * cdf_[j] + h10 * w * pdf_[j] + h01 * cdf_[j + 1] + h11 * w * pdf_[j + 1];
}

namespace {

KernelTable kernel_table(const RepulsionFamily& family, std::span<const double> lags,
                         std::span<const double> starts, std::span<const double> ends,
                         bool parallel) {
  KernelTable table{{lags.begin(), lags.end()},
                    {starts.begin(), starts.end()},
                    {ends.begin(), ends.end()},
                    std::vector<double>(lags.size() * starts.size() * ends.size())};
  const auto total = static_cast<std::int64_t>(table.values.size());
  const std::size_t n_end = ends.size();
  const std::size_t n_start = starts.size();
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t i = 0; i < total; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    const std::size_t e = idx % n_end;
    const std::size_t s = (idx / n_end) % n_start;
    const std::size_t l = idx / (n_end * n_start);
    table.values[idx] = transition_density({family, lags[l], starts[s], ends[e]});
  }
  return table;
}

}  // namespace

KernelTable transition_density_table(const RepulsionFamily& family, std::span<const double> lags,
                                     std::span<const double> starts,
                                     std::span<const double> ends) {
  return kernel_table(family, lags, starts, ends, true);
}

KernelTable transition_density_table_serial(const RepulsionFamily& family,
                                            std::span<const double> lags,
                                            std::span<const double> starts,
                                            std::span<const double> ends) {
  return kernel_table(family, lags, starts, ends, false);
}

}  // namespace levelflow
