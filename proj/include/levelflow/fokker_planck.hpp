#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "levelflow/spacing_distributions.hpp"

namespace levelflow {

/// Cell-centred density on [0, x_max]; cell i has centre (i + 1/2) h.
class DensityGrid {
 public:
  /// Throws DomainError unless x_max >= 6, cells >= 100 and every value is
  /// finite and non-negative.
  DensityGrid(double x_max, std::vector<double> values);

  /// Samples `f` at the cell centres and rescales to unit mass.
  static DensityGrid from_function(const std::function<double(double)>& f, double x_max,
                                   std::size_t cells);

  double x_max() const { return x_max_; }
  std::size_t cells() const { return values_.size(); }
  double h() const { return x_max_ / static_cast<double>(values_.size()); }
  double center(std::size_t i) const { return (static_cast<double>(i) + 0.5) * h(); }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  /// h * sum(values).
  double mass() const;
  DensityGrid normalized() const;

 private:
  double x_max_;
  std::vector<double> values_;
};

/// Normalized restriction of the invariant density to the cell centres.
DensityGrid invariant_grid(const RepulsionFamily& family, double x_max, std::size_t cells);

/// Normalized Gaussian bump of width `width` centred at `center`.
DensityGrid gaussian_bump(double center, double width, double x_max, std::size_t cells);

enum class Stepping { Explicit, Implicit };

/// Largest explicit step that keeps every cell non-negative; never above h^2.
double max_explicit_dt(const RepulsionFamily& family, double x_max, std::size_t cells);

struct Evolution {
  DensityGrid density;
  std::size_t steps = 0;
  double dt = 0.0;               // step actually used, t / steps
  double max_mass_drift = 0.0;   // max over steps of |mass - initial mass|
  double min_value = 0.0;        // smallest cell value seen
};

/// Advances d_t rho = D d_xx rho - d_x(b rho) to time t with zero flux at
/// both ends. Face fluxes use exponential fitting against the invariant
/// density, so the invariant grid is an exact discrete equilibrium.
///
/// Explicit stepping rejects dt > h^2 and dt above max_explicit_dt with
/// ConfigError. Implicit (backward Euler) stepping accepts any dt > 0. The
/// requested dt is shortened so that a whole number of steps reaches t.
/// DomainError when beta < 1 and the first cell holds more than 1e-6 mass.
Evolution evolve_density_traced(const RepulsionFamily& family, const DensityGrid& rho0, double t,
                                double dt, Stepping stepping = Stepping::Explicit);

DensityGrid evolve_density(const RepulsionFamily& family, const DensityGrid& rho0, double t,
                           double dt, Stepping stepping = Stepping::Explicit);

/// max over interior faces of |D rho' - b rho| using the scheme's face flux.
double stationary_flux_norm(const RepulsionFamily& family, const DensityGrid& rho);

/// h * sum |rho_i - f(x_i)|.
double l1_distance(const DensityGrid& rho, const std::function<double(double)>& f);
double l1_distance(const DensityGrid& a, const DensityGrid& b);

}  // namespace levelflow
