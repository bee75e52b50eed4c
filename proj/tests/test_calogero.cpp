#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "levelflow/calogero.hpp"
#include "levelflow/errors.hpp"

using namespace levelflow;

TEST_CASE("potential_from_drift recovers the ground-state potential") {
  for (double n : {2.0, 3.0, 4.0, 5.0, 7.0}) {
    const RepulsionFamily f(n);
    const auto b = [&](double x) { return forward_drift(f, x); };
    for (double x = 0.2; x <= 4.0; x += 0.1) {
      CHECK(std::abs(potential_from_drift(b, x) - ground_state_potential(f.beta(), x)) < 1e-6);
    }
  }
  const auto ou = [](double x) { return -x; };
  for (double x : {0.5, 1.0, 2.0}) CHECK(potential_from_drift(ou, x) == doctest::Approx(0.5 * (x * x - 1.0)));
  const RepulsionFamily gue(3.0);
  CHECK(potential_from_drift([&](double x) { return forward_drift(gue, x); }, 1.0) ==
        doctest::Approx(-1.0).epsilon(1e-9));
  CHECK_THROWS_AS(potential_from_drift(ou, 1e-6), DomainError);
}

TEST_CASE("calogero_potential values and the shift identity") {
  CHECK(calogero_potential(1.0, 1.0) == 0.375);
  CHECK(calogero_potential(2.0, 2.0) == 2.0);
  CHECK_THROWS_AS(calogero_potential(2.0, 0.0), DomainError);
  for (double beta : {1.0, 2.0, 3.0, 4.0, 6.0}) {
    for (double x = 0.1; x <= 6.0; x += 0.07) {
      const double shift = calogero_potential(beta, x) - ground_state_potential(beta, x);
      CHECK(std::abs(shift - exact_eigenvalue(beta, 0)) < 1e-12 * std::max(1.0, calogero_potential(beta, x)));
    }
  }
}

TEST_CASE("exact eigenvalues") {
  CHECK(exact_eigenvalue(2.0, 0) == 1.5);
  CHECK(exact_eigenvalue(4.0, 0) == 2.5);
  CHECK(exact_eigenvalue(3.0, 2) == 6.0);
  for (double beta : {1.0, 2.0, 3.0, 4.0, 5.5}) CHECK(exact_eigenvalue(beta, 0) == doctest::Approx(0.5 * (beta + 1.0)));
  CHECK_THROWS_AS(exact_eigenvalue(-1.0, 0), DomainError);
  CHECK_THROWS_AS(exact_eigenvalue(2.0, -1), DomainError);
}

TEST_CASE("eigen_solve matches the spectrum formula") {
  for (double beta : {0.0, 0.5, 1.0, 2.0, 3.0, 4.0}) {
    const auto e = eigen_solve({beta, 10.0, 1e-3}, 6);
    REQUIRE(e.size() == 6);
    CHECK(std::is_sorted(e.begin(), e.end()));
    for (int n = 0; n < 6; ++n) {
      CHECK_MESSAGE(std::abs(e[n] - exact_eigenvalue(beta, n)) < 1e-3, "beta=" << beta << " n=" << n);
    }
  }
  const auto two = eigen_solve({2.0, 10.0, 1e-3}, 3);
  CHECK(two[0] == doctest::Approx(1.5).epsilon(1e-3));
  CHECK(two[1] == doctest::Approx(3.5).epsilon(1e-3));
  CHECK(two[2] == doctest::Approx(5.5).epsilon(1e-3));
  CHECK(std::abs(eigen_solve({4.0, 10.0, 1e-3}, 1)[0] - 2.5) < 1e-3);
}

TEST_CASE("eigenvalue error is second order in h") {
  for (double beta : {1.0, 3.0}) {
    const double coarse = std::abs(eigen_solve({beta, 10.0, 2e-3}, 3)[2] - exact_eigenvalue(beta, 2));
    const double fine = std::abs(eigen_solve({beta, 10.0, 1e-3}, 3)[2] - exact_eigenvalue(beta, 2));
    CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.1));
  }
}

TEST_CASE("direct stencil is second order away from the critical coupling") {
  for (double beta : {0.0, 2.0, 3.0, 4.0}) {
    CalogeroProblem p{beta, 10.0, 1e-3, CalogeroScheme::Direct};
    const auto e = eigen_solve(p, 6);
    for (int n = 0; n < 6; ++n) CHECK(std::abs(e[n] - exact_eigenvalue(beta, n)) < 1e-3);
  }
  // beta = 1: psi ~ sqrt(x) at the origin and the direct stencil stalls.
  const double gap = eigen_solve({1.0, 10.0, 1e-3, CalogeroScheme::Direct}, 1)[0] - 1.0;
  CHECK(gap > 1e-2);
}

TEST_CASE("eigen_solve validation") {
  CHECK_THROWS_AS(eigen_solve({-1.0, 10.0, 1e-3}, 1), DomainError);
  CHECK_THROWS_AS(eigen_solve({2.0, 7.0, 1e-3}, 1), DomainError);
  CHECK_THROWS_AS(eigen_solve({2.0, 10.0, 0.0}, 1), DomainError);
  CHECK_THROWS_AS(eigen_solve({2.0, 10.0, 1e-3}, 0), DomainError);
  CHECK_THROWS_AS(eigen_solve({2.0, 10.0, 1e-9}, 1), ConfigError);
  CHECK_NOTHROW(eigen_solve({-0.5, 10.0, 1e-3}, 2));
}

TEST_CASE("ground-state identity residuals") {
  for (double n : {2.0, 3.0, 4.0, 5.0, 7.0}) {
    const auto r = ground_state_identity_residual(RepulsionFamily(n));
    CHECK_MESSAGE(r.hamiltonian < 1e-5, "n=" << n);
    CHECK_MESSAGE(r.drift_loop < 1e-5, "n=" << n);
  }
  // 0 < beta < 1: sqrt(rho) is still an eigenfunction with energy (beta + 1) / 2,
  // which lies below the spectrum formula's ground level.
  const auto weak = ground_state_identity_residual(RepulsionFamily(1.5));
  CHECK(weak.hamiltonian < 1e-5);
  CHECK(weak.drift_loop < 1e-5);
  CHECK(exact_eigenvalue(0.5, 0) - 0.75 == doctest::Approx(0.5));
}

TEST_CASE("drift -> potential -> ground state -> drift loop closes") {
  for (double n : {2.0, 3.0, 5.0}) {
    const RepulsionFamily f(n);
    const auto g = ground_state({f.beta(), 10.0, 5e-4});
    CHECK(std::abs(g.energy - exact_eigenvalue(f.beta(), 0)) < 1e-6);
    CHECK(std::all_of(g.psi.begin(), g.psi.end(), [](double v) { return v >= 0.0; }));
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < g.x.size(); ++i) {
      if (g.x[i] < 0.2 || g.x[i] > 4.0) continue;
      // drift = 2D (sqrt rho)' / sqrt rho with rho = psi^2, D = 1/2
      const double b = (g.psi[i + 1] - g.psi[i - 1]) / (2.0 * 5e-4 * g.psi[i]);
      worst = std::max(worst, std::abs(b - forward_drift(f, g.x[i])));
    }
    CHECK_MESSAGE(worst < 1e-5, "n=" << n << " worst=" << worst);
    // psi^2 is the invariant density
    double gap = 0.0;
    for (std::size_t i = 0; i < g.x.size(); i += 50) {
      gap = std::max(gap, std::abs(g.psi[i] * g.psi[i] - invariant_density(f, g.x[i])));
    }
    CHECK(gap < 1e-5);
  }
}
