#include "levelflow/calogero.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levelflow/errors.hpp"

namespace levelflow {

void CalogeroProblem::validate() const {
  constexpr std::string_view kOp = "eigen_solve";
  if (!(beta > -1.0) || !std::isfinite(beta)) throw DomainError(kOp, "beta must be > -1");
  if (!(h > 0.0)) throw DomainError(kOp, "h must be > 0");
  if (!(x_max >= 8.0) || !std::isfinite(x_max)) throw DomainError(kOp, "x_max must be >= 8");
  if (x_max / h > 5e7) throw ConfigError(kOp, "grid exceeds 5e7 unknowns");
}

std::size_t CalogeroProblem::unknowns() const {
  const auto cells = static_cast<std::size_t>(std::llround(x_max / h));
  return scheme == CalogeroScheme::Direct ? cells - 1 : cells;
}

double CalogeroProblem::node(std::size_t i) const {
  const double offset = scheme == CalogeroScheme::Direct ? 1.0 : 0.5;
  return (static_cast<double>(i) + offset) * h;
}

double potential_from_drift(const std::function<double(double)>& drift, double x) {
  const double h = derivative_step(x);
  if (!(x - 2.0 * h > 0.0)) throw DomainError("potential_from_drift", "stencil crosses x <= 0");
  const double slope =
      (drift(x - 2.0 * h) - 8.0 * drift(x - h) + 8.0 * drift(x + h) - drift(x + 2.0 * h)) / (12.0 * h);
  const double b = drift(x);
  return 0.5 * (b * b + slope);
}

double calogero_potential(double beta, double x) {
  if (!(x > 0.0)) throw DomainError("calogero_potential", "x must be > 0");
  return 0.5 * x * x + beta * (beta - 2.0) / (8.0 * x * x);
}

double ground_state_potential(double beta, double x) {
  if (!(x > 0.0)) throw DomainError("ground_state_potential", "x must be > 0");
  return 0.5 * (beta * (beta - 2.0) / (4.0 * x * x) - (beta + 1.0) + x * x);
}

double exact_eigenvalue(double beta, int n) {
  if (!(beta > -1.0)) throw DomainError("exact_eigenvalue", "beta must be > -1");
  if (n < 0) throw DomainError("exact_eigenvalue", "n must be >= 0");
  const double radicand = 1.0 + beta * (beta - 2.0);
  if (radicand < 0.0) throw DomainError("exact_eigenvalue", "negative radicand");
  return 2.0 * n + 1.0 + 0.5 * std::sqrt(radicand);
}

namespace {

// Symmetric tridiagonal: off[i] couples unknowns i and i + 1.
struct Tridiagonal {
  std::vector<double> diag;
  std::vector<double> off;
};

double order_of(double beta) { return 0.5 * std::abs(beta - 1.0); }

Tridiagonal discretize(const CalogeroProblem& p) {
  p.validate();
  const std::size_t m = p.unknowns();
  if (m < 2) throw DomainError("eigen_solve", "grid too coarse");
  const double h = p.h;
  const double kinetic = 1.0 / (h * h);
  Tridiagonal t;
  t.diag.resize(m);
  t.off.resize(m - 1);
  if (p.scheme == CalogeroScheme::Direct) {
    for (std::size_t i = 0; i < m; ++i) t.diag[i] = kinetic + calogero_potential(p.beta, p.node(i));
    std::fill(t.off.begin(), t.off.end(), -0.5 * kinetic);
    return t;
  }
  // -(1/2) w^{-1} (w phi')' + x^2/2 phi = E phi with w = x^(2 nu + 1). Face
  // weights w((i+1) h), cell weights are cell averages of w; the face at 0
  // carries zero weight and the one at x_max is Dirichlet (ghost phi = 0).
  const double p2 = 2.0 * order_of(p.beta) + 2.0;
  const auto face = [&](std::size_t i) { return std::pow(static_cast<double>(i) * h, p2 - 1.0); };
  std::vector<double> cell(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double a = static_cast<double>(i) * h;
    cell[i] = (std::pow(a + h, p2) - std::pow(a, p2)) / (p2 * h);
  }
  for (std::size_t i = 0; i < m; ++i) {
    const double right = i + 1 < m ? face(i + 1) : 2.0 * face(m);
    const double x = p.node(i);
    t.diag[i] = 0.5 * kinetic * (face(i) + right) / cell[i] + 0.5 * x * x;
    if (i + 1 < m) t.off[i] = -0.5 * kinetic * face(i + 1) / std::sqrt(cell[i] * cell[i + 1]);
  }
  return t;
}

// Number of eigenvalues strictly below `lambda`.
std::size_t sturm_count(const Tridiagonal& t, double lambda) {
  const double tiny = std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
  std::size_t count = 0;
  double d = 1.0;
  for (std::size_t i = 0; i < t.diag.size(); ++i) {
    d = t.diag[i] - lambda - (i > 0 ? t.off[i - 1] * t.off[i - 1] / d : 0.0);
    if (d == 0.0) d = -tiny;
    if (d < 0.0) ++count;
  }
  return count;
}

std::vector<double> lowest_eigenvalues(const Tridiagonal& t, std::size_t k) {
  double lo0 = std::numeric_limits<double>::infinity();
  double hi0 = -lo0;
  const std::size_t m = t.diag.size();
  for (std::size_t i = 0; i < m; ++i) {
    const double radius = (i > 0 ? std::abs(t.off[i - 1]) : 0.0) + (i + 1 < m ? std::abs(t.off[i]) : 0.0);
    lo0 = std::min(lo0, t.diag[i] - radius);
    hi0 = std::max(hi0, t.diag[i] + radius);
  }
  std::vector<double> values(k);
  for (std::size_t j = 0; j < k; ++j) {
    double lo = j > 0 ? values[j - 1] : lo0;
    double hi = hi0;
    int iter = 0;
    while (hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi))) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (sturm_count(t, mid) > j) {
        hi = mid;
      } else {
        lo = mid;
      }
      if (++iter > 400) throw NumericalError("eigen_solve", "bisection did not converge");
    }
    values[j] = 0.5 * (lo + hi);
  }
  return values;
}

}  // namespace

std::vector<double> eigen_solve(const CalogeroProblem& problem, std::size_t k) {
  if (k == 0) throw DomainError("eigen_solve", "k must be >= 1");
  const Tridiagonal t = discretize(problem);
  if (k > t.diag.size()) throw DomainError("eigen_solve", "k exceeds the grid size");
  return lowest_eigenvalues(t, k);
}

GroundState ground_state(const CalogeroProblem& problem) {
  const Tridiagonal t = discretize(problem);
  const double e0 = lowest_eigenvalues(t, 1).front();
  // Inverse iteration just below e0: T - shift is positive definite, so
  // elimination without pivoting is stable.
  const double shift = e0 - 1e-8 * std::max(1.0, std::abs(e0));
  const std::size_t m = t.diag.size();
  std::vector<double> pivot(m);
  pivot[0] = t.diag[0] - shift;
  for (std::size_t i = 1; i < m; ++i) pivot[i] = t.diag[i] - shift - t.off[i - 1] * t.off[i - 1] / pivot[i - 1];
  std::vector<double> v(m, 1.0);
  for (int sweep = 0; sweep < 4; ++sweep) {
    for (std::size_t i = 1; i < m; ++i) v[i] -= t.off[i - 1] / pivot[i - 1] * v[i - 1];
    v[m - 1] /= pivot[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) v[i] = (v[i] - t.off[i] * v[i + 1]) / pivot[i];
    const double peak = *std::max_element(v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    for (double& x : v) x /= peak;
  }

  GroundState g;
  g.energy = e0;
  g.x.resize(m);
  g.psi.resize(m);
  const double h = problem.h;
  const double p2 = 2.0 * order_of(problem.beta) + 2.0;
  for (std::size_t i = 0; i < m; ++i) {
    g.x[i] = problem.node(i);
    if (problem.scheme == CalogeroScheme::Direct) {
      g.psi[i] = v[i];
    } else {
      // v holds sqrt(cell weight) * phi; psi = x^(nu + 1/2) phi.
      const double a = static_cast<double>(i) * h;
      const double cell = (std::pow(a + h, p2) - std::pow(a, p2)) / (p2 * h);
      g.psi[i] = std::pow(g.x[i], 0.5 * (p2 - 1.0)) * v[i] / std::sqrt(cell);
    }
  }
  double norm = 0.0;
  for (double x : g.psi) norm += x * x;
  norm = std::sqrt(norm * h);
  for (double& x : g.psi) x /= norm;
  return g;
}

GroundStateResidual ground_state_identity_residual(const RepulsionFamily& family) {
  constexpr double kLo = 0.2;
  constexpr double kHi = 4.0;
  constexpr double kStep = 1e-4;
  const double beta = family.beta();
  // Energy of the ground-state process. It equals exact_eigenvalue(beta, 0)
  // for beta >= 1; below that sqrt(rho) ~ x^(beta/2) sits on the other
  // branch at the origin, under the bottom of the formula's spectrum.
  const double e0 = 0.5 * (beta + 1.0);
  const auto root = [&](double x) { return std::exp(0.5 * invariant_log_density(family, x)); };
  const auto rho = [&](double x) { return invariant_density(family, x); };

  GroundStateResidual r;
  const auto count = static_cast<int>(std::llround((kHi - kLo) / kStep));
  for (int i = 0; i <= count; ++i) {
    const double x = kLo + kStep * i;
    const double psi = root(x);
    const double lap = (root(x - kStep) - 2.0 * psi + root(x + kStep)) / (kStep * kStep);
    const double h_psi = -0.5 * lap + calogero_potential(beta, x) * psi;
    r.hamiltonian = std::max(r.hamiltonian, std::abs(h_psi - e0 * psi));
  }
  for (int i = 0; i <= count; i += 10) {
    const double x = kLo + kStep * i;
    r.drift_loop = std::max(
        r.drift_loop, std::abs(drift_from_density(rho, family.diffusion(), x) - forward_drift(family, x)));
  }
  return r;
}

}  // namespace levelflow
