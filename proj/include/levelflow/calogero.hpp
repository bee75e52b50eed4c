#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "levelflow/spacing_distributions.hpp"

namespace levelflow {

// H = -(1/2) d^2/dx^2 + x^2/2 + beta (beta - 2) / (8 x^2) on the half-line.

enum class CalogeroScheme {
  /// Three-point Laplacian on psi at x_i = i h, Dirichlet at both ends.
  /// Converges only logarithmically at beta = 1, where psi ~ sqrt(x).
  Direct,
  /// psi = x^(nu + 1/2) phi with nu = |beta - 1| / 2, three-point
  /// conservative stencil on the weighted problem for phi at cell centres.
  /// Second order for every beta.
  PowerSubstitution,
};

struct CalogeroProblem {
  double beta = 2.0;
  double x_max = 10.0;
  double h = 1e-3;
  CalogeroScheme scheme = CalogeroScheme::PowerSubstitution;

  /// Throws DomainError unless beta > -1, h > 0 and x_max >= 8; ConfigError
  /// above 5e7 unknowns.
  void validate() const;
  /// Number of unknowns: x_max / h - 1 (Direct) or x_max / h (PowerSubstitution).
  std::size_t unknowns() const;
  /// Node of unknown i: (i + 1) h or (i + 1/2) h.
  double node(std::size_t i) const;
};

/// (1/2)(b(x)^2 + b'(x)), b' by a five-point central difference.
/// DomainError if the stencil reaches x <= 0.
double potential_from_drift(const std::function<double(double)>& drift, double x);

double calogero_potential(double beta, double x);

/// Potential of H - E_0 for the ground-state process:
/// (1/2)[beta (beta - 2) / (4 x^2) - (beta + 1) + x^2].
double ground_state_potential(double beta, double x);

/// 2n + 1 + (1/2) sqrt(1 + beta (beta - 2)).
double exact_eigenvalue(double beta, int n);

/// k lowest eigenvalues of the symmetric tridiagonal discretization, by
/// Sturm-sequence bisection. NumericalError if bisection stalls.
std::vector<double> eigen_solve(const CalogeroProblem& problem, std::size_t k);

struct GroundState {
  double energy = 0.0;
  std::vector<double> x;
  std::vector<double> psi;  // positive, h * sum psi^2 = 1
};

/// Discrete ground state by inverse iteration.
GroundState ground_state(const CalogeroProblem& problem);

struct GroundStateResidual {
  double hamiltonian = 0.0;  // max |(H - E_0) sqrt(rho)|
  double drift_loop = 0.0;   // max |drift_from_density(rho) - forward_drift|
};

/// Both residuals on x in [0.2, 4] with a 1e-4 grid for the Laplacian.
GroundStateResidual ground_state_identity_residual(const RepulsionFamily& family);

}  // namespace levelflow
