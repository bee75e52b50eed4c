#include "levelflow/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "levelflow/errors.hpp"

namespace levelflow {

namespace {

constexpr std::string_view kOp = "evolve_density";
constexpr double kMinXMax = 6.0;
constexpr std::size_t kMinCells = 100;

// Bernoulli function z / (e^z - 1).
double bernoulli(double z) {
  if (std::abs(z) < 1e-6) return 1.0 - 0.5 * z + z * z / 12.0;
  return z / std::expm1(z);
}

// Face coefficients for F_{i+1/2} = lo[i] rho_i - hi[i] rho_{i+1}, i < cells - 1.
struct FaceCoefficients {
  std::vector<double> lo;
  std::vector<double> hi;
};

FaceCoefficients face_coefficients(const RepulsionFamily& family, double h, std::size_t cells) {
  FaceCoefficients c;
  c.lo.resize(cells - 1);
  c.hi.resize(cells - 1);
  const double scale = family.diffusion() / h;
  // Exact integral of b / D across the face; equals the jump in log rho* when D = 1/2.
  const double gain = 0.5 / family.diffusion();
  for (std::size_t i = 0; i + 1 < cells; ++i) {
    const double a = (static_cast<double>(i) + 0.5) * h;
    const double b = a + h;
    const double p = gain * ((family.n() - 1.0) * std::log(b / a) - (b * b - a * a));
    c.lo[i] = scale * bernoulli(-p);
    c.hi[i] = scale * bernoulli(p);
  }
  return c;
}

}  // namespace

DensityGrid::DensityGrid(double x_max, std::vector<double> values)
    : x_max_(x_max), values_(std::move(values)) {
  if (!(x_max_ >= kMinXMax) || !std::isfinite(x_max_)) {
    throw DomainError("DensityGrid", "x_max must be >= 6");
  }
  if (values_.size() < kMinCells) throw DomainError("DensityGrid", "need at least 100 cells");
  for (double v : values_) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw DomainError("DensityGrid", "values must be finite and non-negative");
    }
  }
}

DensityGrid DensityGrid::from_function(const std::function<double(double)>& f, double x_max,
                                       std::size_t cells) {
  std::vector<double> values(cells);
  const double h = x_max / static_cast<double>(cells);
  for (std::size_t i = 0; i < cells; ++i) values[i] = f((static_cast<double>(i) + 0.5) * h);
  return DensityGrid(x_max, std::move(values)).normalized();
}

double DensityGrid::mass() const {
  return h() * std::accumulate(values_.begin(), values_.end(), 0.0);
}

DensityGrid DensityGrid::normalized() const {
  const double m = mass();
  if (!(m > 0.0)) throw DomainError("DensityGrid", "cannot normalize zero mass");
  std::vector<double> v(values_);
  for (double& x : v) x /= m;
  return DensityGrid(x_max_, std::move(v));
}

DensityGrid invariant_grid(const RepulsionFamily& family, double x_max, std::size_t cells) {
  return DensityGrid::from_function([&](double x) { return invariant_density(family, x); },
                                    x_max, cells);
}

DensityGrid gaussian_bump(double center, double width, double x_max, std::size_t cells) {
  if (!(width > 0.0)) throw DomainError("gaussian_bump", "width must be > 0");
  return DensityGrid::from_function(
      [&](double x) {
        const double z = (x - center) / width;
        return std::exp(-0.5 * z * z);
      },
      x_max, cells);
}

double max_explicit_dt(const RepulsionFamily& family, double x_max, std::size_t cells) {
  const double h = x_max / static_cast<double>(cells);
  const auto c = face_coefficients(family, h, cells);
  // Diagonal rate of cell i: (lo[i] + hi[i-1]) / h.
  double rate = 0.0;
  for (std::size_t i = 0; i < cells; ++i) {
    const double out = (i + 1 < cells ? c.lo[i] : 0.0) + (i > 0 ? c.hi[i - 1] : 0.0);
    rate = std::max(rate, out / h);
  }
  return std::min(h * h, 1.0 / rate);
}

Evolution evolve_density_traced(const RepulsionFamily& family, const DensityGrid& rho0, double t,
                                double dt, Stepping stepping) {
  if (!(t > 0.0)) throw ConfigError(kOp, "t must be > 0");
  if (!(dt > 0.0)) throw ConfigError(kOp, "dt must be > 0");
  const std::size_t cells = rho0.cells();
  const double h = rho0.h();
  if (std::abs(rho0.mass() - 1.0) > 1e-9) throw DomainError(kOp, "initial density must be normalized");
  if (family.beta() < 1.0 && h * rho0[0] > 1e-6) {
    throw DomainError(kOp, "first cell holds more than 1e-6 mass with beta < 1");
  }
  if (stepping == Stepping::Explicit) {
    if (dt > h * h) {
      throw ConfigError(kOp, "dt = " + std::to_string(dt) + " exceeds h^2 = " + std::to_string(h * h));
    }
    const double bound = max_explicit_dt(family, rho0.x_max(), cells);
    if (dt > bound) {
      throw ConfigError(kOp, "dt = " + std::to_string(dt) +
                                 " exceeds the positivity bound " + std::to_string(bound));
    }
  }
  const auto steps = static_cast<std::size_t>(std::ceil(t / dt * (1.0 - 1e-12)));
  const double step = t / static_cast<double>(steps);
  const double r = step / h;
  const auto coeff = face_coefficients(family, h, cells);
  const auto& lo = coeff.lo;
  const auto& hi = coeff.hi;

  std::vector<double> rho = rho0.values();
  const double mass0 = rho0.mass();
  double drift = 0.0;
  double lowest = *std::min_element(rho.begin(), rho.end());

  if (stepping == Stepping::Explicit) {
    std::vector<double> flux_store(cells + 1, 0.0);  // flux[i] sits on the face left of cell i
    double* __restrict flux = flux_store.data();
    double* __restrict p = rho.data();
    const double* __restrict a = lo.data();
    const double* __restrict b = hi.data();
    const std::size_t faces = cells - 1;
    for (std::size_t s = 0; s < steps; ++s) {
#pragma omp simd
      for (std::size_t i = 0; i < faces; ++i) flux[i + 1] = a[i] * p[i] - b[i] * p[i + 1];
      double sum = 0.0;
      double low = p[0];
#pragma omp simd reduction(+ : sum) reduction(min : low)
      for (std::size_t i = 0; i < cells; ++i) {
        p[i] += r * (flux[i] - flux[i + 1]);
        sum += p[i];
        low = std::min(low, p[i]);
      }
      drift = std::max(drift, std::abs(h * sum - mass0));
      lowest = std::min(lowest, low);
    }
  } else {
    // Backward Euler: tridiagonal rows (-r lo[i-1], 1 + r (hi[i-1] + lo[i]), -r hi[i]).
    std::vector<double> sub(cells, 0.0), diag(cells), sup(cells, 0.0);
    for (std::size_t i = 0; i < cells; ++i) {
      diag[i] = 1.0 + r * ((i > 0 ? hi[i - 1] : 0.0) + (i + 1 < cells ? lo[i] : 0.0));
      if (i > 0) sub[i] = -r * lo[i - 1];
      if (i + 1 < cells) sup[i] = -r * hi[i];
    }
    // Thomas factorization, reused every step.
    std::vector<double> factor(cells), pivot(cells);
    pivot[0] = diag[0];
    for (std::size_t i = 1; i < cells; ++i) {
      factor[i] = sub[i] / pivot[i - 1];
      pivot[i] = diag[i] - factor[i] * sup[i - 1];
    }
    for (std::size_t s = 0; s < steps; ++s) {
      for (std::size_t i = 1; i < cells; ++i) rho[i] -= factor[i] * rho[i - 1];
      rho[cells - 1] /= pivot[cells - 1];
      for (std::size_t i = cells - 1; i-- > 0;) rho[i] = (rho[i] - sup[i] * rho[i + 1]) / pivot[i];
      double sum = 0.0;
      for (double v : rho) {
        sum += v;
        lowest = std::min(lowest, v);
      }
      drift = std::max(drift, std::abs(h * sum - mass0));
    }
  }
  if (!std::all_of(rho.begin(), rho.end(), [](double v) { return std::isfinite(v); })) {
    throw NumericalError(kOp, "non-finite density");
  }
  for (double& v : rho) v = std::max(v, 0.0);
  return {DensityGrid(rho0.x_max(), std::move(rho)), steps, step, drift, lowest};
}

DensityGrid evolve_density(const RepulsionFamily& family, const DensityGrid& rho0, double t,
                           double dt, Stepping stepping) {
  return evolve_density_traced(family, rho0, t, dt, stepping).density;
}

double stationary_flux_norm(const RepulsionFamily& family, const DensityGrid& rho) {
  const auto c = face_coefficients(family, rho.h(), rho.cells());
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < rho.cells(); ++i) {
    worst = std::max(worst, std::abs(c.lo[i] * rho[i] - c.hi[i] * rho[i + 1]));
  }
  return worst;
}

double l1_distance(const DensityGrid& rho, const std::function<double(double)>& f) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rho.cells(); ++i) sum += std::abs(rho[i] - f(rho.center(i)));
  return rho.h() * sum;
}

double l1_distance(const DensityGrid& a, const DensityGrid& b) {
  if (a.cells() != b.cells() || a.x_max() != b.x_max()) {
    throw DomainError("l1_distance", "grids differ");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.cells(); ++i) sum += std::abs(a[i] - b[i]);
  return a.h() * sum;
}

}  // namespace levelflow
