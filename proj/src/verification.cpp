#include "levelflow/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <ostream>

#include "levelflow/calogero.hpp"
#include "levelflow/fokker_planck.hpp"
#include "levelflow/io.hpp"
#include "levelflow/quadrature.hpp"
#include "levelflow/sde_simulator.hpp"
#include "levelflow/spectral_statistics.hpp"
#include "levelflow/transition_kernel.hpp"

namespace levelflow {

bool VerificationReport::all_passed() const { return failures() == 0; }

std::size_t VerificationReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return !c.skipped && !c.passed; }));
}

namespace {

struct Measurement {
  double value;
  double threshold;
  std::string note = {};
};

class Suite {
 public:
  Suite(const RepulsionFamily& family, std::uint64_t seed) : family_(family), seed_(seed) {}

  // Independent seed for the k-th stochastic check.
  std::uint64_t seed_for(std::uint64_t k) const { return make_stream(seed_, k)(); }

  void run(std::string module, std::string name, const std::function<Measurement()>& body) {
    CheckResult c;
    c.module = std::move(module);
    c.name = std::move(name);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const Measurement m = body();
      c.value = m.value;
      c.threshold = m.threshold;
      c.passed = std::isfinite(m.value) && m.value < m.threshold;
      c.note = m.note;
    } catch (const std::exception& e) {
      c.passed = false;
      c.value = std::nan("");
      c.note = e.what();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    checks.push_back(std::move(c));
  }

  void run_if(bool applicable, const std::string& why, std::string module, std::string name,
              const std::function<Measurement()>& body) {
    if (applicable) {
      run(std::move(module), std::move(name), body);
    } else {
      skip(std::move(module), std::move(name), why);
    }
  }

  void skip(std::string module, std::string name, std::string why) {
    CheckResult c;
    c.module = std::move(module);
    c.name = std::move(name);
    c.skipped = true;
    c.note = std::move(why);
    checks.push_back(std::move(c));
  }

  std::vector<CheckResult> checks;

 private:
  RepulsionFamily family_;
  std::uint64_t seed_;
};

std::optional<SurmiseClass> surmise_for(double n) {
  for (auto s : {SurmiseClass::GOE, SurmiseClass::GUE, SurmiseClass::Ginibre, SurmiseClass::GSE}) {
    if (family_of(s).n() == n) return s;
  }
  return std::nullopt;
}

double sigmas(const std::vector<double>& xs, const std::function<double(double)>& f, double expected) {
  double s1 = 0.0;
  double s2 = 0.0;
  for (double x : xs) {
    const double v = f(x);
    s1 += v;
    s2 += v * v;
  }
  const double n = static_cast<double>(xs.size());
  const double mean = s1 / n;
  const double se = std::sqrt((s2 / n - mean * mean) / (n - 1.0));
  return std::abs(mean - expected) / se;
}

}  // namespace

VerificationReport run_verification(const RepulsionFamily& f, std::uint64_t seed) {
  Suite s(f, seed);
  const double n = f.n();
  const double beta = f.beta();
  const bool kernel_ok = n <= kMaxKernelN;
  const std::string kBesselRange = "kernel needs n <= 22 (Bessel order <= 10)";
  // Domains follow the bulk of the invariant density, near sqrt(n/2).
  const double reach = std::sqrt(0.5 * n);
  const double fp_x_max = std::max(10.0, std::ceil(reach + 6.0));
  const auto fp_cells = static_cast<std::size_t>(std::llround(fp_x_max / 2e-3));

  s.run("spacing_distributions", "invariant density integrates to 1", [&] {
    QuadratureOptions o;
    o.initial_panels = 20;
    return Measurement{std::abs(integrate([&](double x) { return invariant_density(f, x); }, 0.0, std::max(12.0, reach + 8.0), o).value - 1.0),
                       1e-10};
  });
  if (const auto surmise = surmise_for(n)) {
    s.run("spacing_distributions", "unit-mean rescaling equals the surmise", [&] {
      double worst = 0.0;
      for (int i = 0; i <= 5000; ++i) {
        const double x = 1e-3 * i;
        worst = std::max(worst, std::abs(rescale_to_unit_mean(f, x) - surmise_density(*surmise, x)));
      }
      return Measurement{worst, 1e-10, std::string(to_string(*surmise))};
    });
  } else {
    s.skip("spacing_distributions", "unit-mean rescaling equals the surmise", "no surmise for this n");
  }
  s.run("spacing_distributions", "stationary flux D rho' - b rho vanishes", [&] {
    double worst = 0.0;
    for (double x = 0.05; x <= 6.0; x += 0.01) {
      const double h = derivative_step(x);
      const auto r = [&](double z) { return invariant_density(f, z); };
      const double slope = (r(x - 2 * h) - 8 * r(x - h) + 8 * r(x + h) - r(x + 2 * h)) / (12 * h);
      worst = std::max(worst, std::abs(f.diffusion() * slope - forward_drift(f, x) * r(x)));
    }
    return Measurement{worst, 1e-10};
  });
  s.run("spacing_distributions", "invariant sampler passes KS", [&] {
    const auto draws = sample_invariant_batch(f, s.seed_for(1), 100'000);
    const auto ks = ks_statistic(draws, [&](double x) { return invariant_cdf(f, x); });
    return Measurement{ks.statistic, ks.critical_value};
  });

  s.run_if(kernel_ok, kBesselRange, "transition_kernel", "kernel integrates to 1", [&] {
    double worst = 0.0;
    QuadratureOptions o;
    o.initial_panels = 40;
    for (double t : {0.01, 0.1, 1.0, 10.0}) {
      for (double y : {0.0, 0.5, 1.0, 3.0}) {
        const auto q = integrate([&](double x) { return transition_density({f, t, y, x}); }, 0.0,
                                 kernel_upper_limit(f, y), o);
        worst = std::max(worst, std::abs(q.value - 1.0));
      }
    }
    return Measurement{worst, 1e-8};
  });
  s.run_if(kernel_ok, kBesselRange, "transition_kernel", "kernel preserves the invariant density", [&] {
    double worst = 0.0;
    QuadratureOptions o;
    o.initial_panels = 40;
    for (double t : {0.1, 1.0}) {
      for (double x : {0.5, 1.0, 2.0}) {
        const auto q = integrate(
            [&](double y) { return transition_density({f, t, y, x}) * invariant_density(f, y); }, 0.0,
            kernel_upper_limit(f, x), o);
        worst = std::max(worst, std::abs(q.value - invariant_density(f, x)));
      }
    }
    return Measurement{worst, 1e-8};
  });
  s.run_if(kernel_ok, kBesselRange, "transition_kernel", "Chapman-Kolmogorov residual", [&] {
    double worst = 0.0;
    for (auto [a, b, y, x] : {std::array{0.3, 0.7, 0.5, 1.0}, std::array{1.0, 1.0, 1.0, 0.5},
                              std::array{0.1, 0.2, 2.0, 1.8}}) {
      worst = std::max(worst, chapman_kolmogorov_residual(f, a, b, y, x));
    }
    return Measurement{worst, 1e-8};
  });
  s.run_if(kernel_ok, kBesselRange, "transition_kernel", "kernel at t = 20 equals the invariant density", [&] {
    double worst = 0.0;
    for (double y : {0.0, 0.5, 1.0, 3.0}) worst = std::max(worst, long_time_limit_distance(f, 20.0, y));
    return Measurement{worst, 1e-6};
  });
  s.run("transition_kernel", "exact sampler second moment (sigmas)", [&] {
    const auto draws = sample_transition_batch(f, 0.5, 1.0, s.seed_for(2), 100'000);
    return Measurement{sigmas(draws, [](double x) { return x * x; }, transition_second_moment(f, 0.5, 1.0)), 3.0};
  });
  s.run_if(kernel_ok, kBesselRange, "transition_kernel", "exact sampler passes KS against the kernel CDF", [&] {
    const auto draws = sample_transition_batch(f, 0.5, 1.0, s.seed_for(3), 100'000);
    const TransitionCdf cdf(f, 0.5, 1.0);
    const auto ks = ks_statistic(draws, [&](double x) { return cdf(x); });
    return Measurement{ks.statistic, ks.critical_value};
  });

  if (beta >= 1.0) {
    s.run_if(kernel_ok, kBesselRange, "sde_simulator", "endpoint moments match the kernel (sigmas)", [&] {
      PathConfig c;
      c.dt = 1e-3;
      c.steps = 1000;
      c.x0 = 1.0;
      const auto e = simulate_ensemble(beta, c, s.seed_for(4), 10'000);
      if (!(e.min_value > 0.0)) return Measurement{INFINITY, 3.0, "a path left (0, inf)"};
      const double m1 = sigmas(e.endpoints, [](double x) { return x; }, transition_moment(f, 1.0, 1.0, 1.0));
      const double m2 = sigmas(e.endpoints, [](double x) { return x * x; }, transition_second_moment(f, 1.0, 1.0));
      return Measurement{std::max(m1, m2), 3.0};
    });
    s.run("fokker_planck", "invariant grid is a fixed point", [&] {
      const auto rho = invariant_grid(f, fp_x_max, fp_cells / 5);
      return Measurement{l1_distance(evolve_density(f, rho, 1.0, 1e-2, Stepping::Implicit), rho), 1e-8};
    });
    s.run("fokker_planck", "bump at x = 1 relaxes to the invariant density", [&] {
      const auto rho = gaussian_bump(1.0, 0.05, fp_x_max, fp_cells);
      const auto out = evolve_density(f, rho, 10.0, 1e-3, Stepping::Implicit);
      return Measurement{l1_distance(out, [&](double x) { return invariant_density(f, x); }), 1e-3};
    });
  } else {
    s.skip("sde_simulator", "endpoint moments match the kernel (sigmas)", "beta < 1: origin is reachable");
    s.skip("fokker_planck", "invariant grid is a fixed point", "beta < 1: density singular at 0");
    s.skip("fokker_planck", "bump at x = 1 relaxes to the invariant density", "beta < 1: density singular at 0");
  }

  s.run("calogero", "eigenvalues n <= 5 match 2n + 1 + sqrt(1 + beta(beta-2))/2", [&] {
    const auto e = eigen_solve({beta, 10.0, 1e-3}, 6);
    double worst = 0.0;
    for (int k = 0; k < 6; ++k) worst = std::max(worst, std::abs(e[k] - exact_eigenvalue(beta, k)));
    return Measurement{worst, 1e-3};
  });
  s.run("calogero", "ground-state identities (H - E0) sqrt(rho), drift loop", [&] {
    const auto r = ground_state_identity_residual(f);
    return Measurement{std::max(r.hamiltonian, r.drift_loop), 1e-5};
  });

  s.run("spectral_statistics", "ergodicity of x and x^2 (sigmas)", [&] {
    Engine rng = make_stream(s.seed_for(5), 0);
    const auto chain = exact_chain(f, 0.5, 100'000, rng);
    const auto a = ergodicity_check(f, chain, [](double x) { return x; });
    const auto b = ergodicity_check(f, chain, [](double x) { return x * x; });
    return Measurement{std::max(a.discrepancy_sigmas, b.discrepancy_sigmas), 3.0,
                       a.short_chain || b.short_chain ? "short chain" : ""};
  });
  if (n <= kFitMaxN) {
    s.run("spectral_statistics", "mle_fit_family recovers n", [&] {
      const auto fit = mle_fit_family(SpacingSample(sample_invariant_batch(f, s.seed_for(6), 100'000)));
      return Measurement{std::abs(fit.n_hat - n), std::max(0.1, 0.03 * n)};
    });
  } else {
    s.skip("spectral_statistics", "mle_fit_family recovers n", "n outside the fit range (1, 12]");
  }
  s.run("spectral_statistics", "2x2 GOE gaps pass KS against unit-mean n = 2", [&] {
    const auto gaps = goe_2x2_spacing_oracle(100'000, s.seed_for(7));
    const RepulsionFamily goe(2.0);
    const auto ks = ks_statistic(gaps, [&](double x) { return unit_mean_cdf(goe, x); });
    return Measurement{ks.statistic, ks.critical_value};
  });

  return VerificationReport{n, seed, std::move(s.checks)};
}

void print_report(std::ostream& out, const VerificationReport& r) {
  char line[256];
  std::snprintf(line, sizeof line, "verify: family n = %s, seed = %llu\n", format_real(r.family_n).c_str(),
                static_cast<unsigned long long>(r.seed));
  out << line;
  for (const auto& c : r.checks) {
    const char* status = c.skipped ? "SKIP" : (c.passed ? "PASS" : "FAIL");
    if (c.skipped) {
      std::snprintf(line, sizeof line, "%-4s  %-21s %-62s (%s)\n", status, c.module.c_str(), c.name.c_str(),
                    c.note.c_str());
    } else {
      std::snprintf(line, sizeof line, "%-4s  %-21s %-62s %10.3e < %-8.2g %6.2fs%s%s\n", status, c.module.c_str(),
                    c.name.c_str(), c.value, c.threshold, c.seconds, c.note.empty() ? "" : "  ", c.note.c_str());
    }
    out << line;
  }
  std::snprintf(line, sizeof line, "%zu checks, %zu failed\n", r.checks.size(), r.failures());
  out << line;
}

}  // namespace levelflow
