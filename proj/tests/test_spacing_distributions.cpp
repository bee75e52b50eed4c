#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "levelflow/errors.hpp"
#include "levelflow/spacing_distributions.hpp"
#include "oracles.hpp"

using namespace levelflow;

namespace {

constexpr double kPi = std::numbers::pi;

// int_0^upper f(x) dx through x = u^2, which smooths the x^{n-1} cusp at 0.
double radial_integral(const std::function<double(double)>& f, double upper) {
  return oracle::simpson([&](double u) { return u == 0.0 ? 0.0 : 2.0 * u * f(u * u); }, 0.0,
                         std::sqrt(upper), 40000);
}

// Five-point central difference.
double derivative(const std::function<double(double)>& f, double x, double h) {
  return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

}  // namespace

TEST_CASE("RepulsionFamily invariants") {
  const RepulsionFamily f(3.0);
  CHECK(f.beta() == 2.0);
  CHECK(f.alpha() == 0.5);
  CHECK(f.diffusion() == 0.5);
  CHECK(RepulsionFamily::from_beta(4.0).n() == 5.0);
  CHECK_THROWS_AS(RepulsionFamily(1.0), DomainError);
  CHECK_THROWS_AS(RepulsionFamily(0.5), DomainError);
  CHECK_THROWS_AS(RepulsionFamily(3.0, 0.0), DomainError);
}

TEST_CASE("surmise classes map to n = 2, 3, 4, 5") {
  CHECK(family_of(SurmiseClass::GOE).n() == 2.0);
  CHECK(family_of(SurmiseClass::GUE).n() == 3.0);
  CHECK(family_of(SurmiseClass::Ginibre).n() == 4.0);
  CHECK(family_of(SurmiseClass::GSE).n() == 5.0);
}

TEST_CASE("invariant_density values") {
  CHECK(invariant_density(RepulsionFamily(2.0), 1.0) == doctest::Approx(2.0 / std::exp(1.0)).epsilon(1e-14));
  CHECK(invariant_density(RepulsionFamily(4.0), 1.0) == doctest::Approx(2.0 / std::exp(1.0)).epsilon(1e-14));
  // N = 3: 4/sqrt(pi) x^2 e^{-x^2}; N = 5: 8/(3 sqrt(pi)) x^4 e^{-x^2}
  CHECK(invariant_density(RepulsionFamily(3.0), 1.3) ==
        doctest::Approx(4.0 / std::sqrt(kPi) * 1.69 * std::exp(-1.69)).epsilon(1e-14));
  CHECK(invariant_density(RepulsionFamily(5.0), 0.7) ==
        doctest::Approx(8.0 / (3.0 * std::sqrt(kPi)) * std::pow(0.7, 4) * std::exp(-0.49)).epsilon(1e-14));
  for (double n : {1.5, 2.0, 3.0, 7.0}) CHECK(invariant_density(RepulsionFamily(n), 0.0) == 0.0);
  CHECK_THROWS_AS(invariant_density(RepulsionFamily(2.0), -0.1), DomainError);
}

TEST_CASE("invariant_density is normalized") {
  for (double n : {2.0, 2.5, 3.0, 4.0, 5.0, 7.0}) {
    const RepulsionFamily f(n);
    const double mass = radial_integral([&](double x) { return invariant_density(f, x); }, 12.0);
    CHECK_MESSAGE(std::abs(mass - 1.0) < 1e-10, "n=" << n);
  }
}

TEST_CASE("invariant_cdf") {
  const RepulsionFamily goe(2.0);
  CHECK(invariant_cdf(goe, 0.0) == 0.0);
  const double quad = radial_integral([&](double x) { return invariant_density(goe, x); }, 1.0);
  CHECK(std::abs(invariant_cdf(goe, 1.0) - quad) < 1e-12);
  CHECK(std::abs(invariant_cdf(goe, 1.0) - (1.0 - std::exp(-1.0))) < 1e-15);
  CHECK(invariant_cdf(RepulsionFamily(5.0), 30.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(invariant_cdf(goe, -1.0), DomainError);
}

TEST_CASE("invariant_cdf derivative matches the density") {
  for (double n : {2.0, 3.0, 4.0, 5.0}) {
    const RepulsionFamily f(n);
    for (double x = 0.1; x <= 4.0; x += 0.1) {
      const double slope = derivative([&](double u) { return invariant_cdf(f, u); }, x, 1e-3);
      CHECK(std::abs(slope - invariant_density(f, x)) < 1e-6);
    }
  }
}

TEST_CASE("surmise_density evaluates the literal formulas") {
  // mpmath, 30 digits
  CHECK(surmise_density(SurmiseClass::GOE, 1.0) == doctest::Approx(0.716185936340569152782).epsilon(1e-14));
  CHECK(surmise_density(SurmiseClass::GUE, 1.0) == doctest::Approx(0.907589210916681390560).epsilon(1e-14));
  for (auto c : {SurmiseClass::GOE, SurmiseClass::GUE, SurmiseClass::Ginibre, SurmiseClass::GSE}) {
    CHECK(surmise_density(c, 0.0) == 0.0);
    CHECK_THROWS_AS(surmise_density(c, -1.0), DomainError);
  }
}

TEST_CASE("surmises have unit mass and unit mean") {
  for (auto c : {SurmiseClass::GOE, SurmiseClass::GUE, SurmiseClass::Ginibre, SurmiseClass::GSE}) {
    const auto p = [&](double s) { return surmise_density(c, s); };
    const double mass = radial_integral(p, 10.0);
    const double mean = radial_integral([&](double s) { return s * p(s); }, 10.0);
    CHECK(std::abs(mass - 1.0) < 1e-10);
    CHECK(std::abs(mean - 1.0) < 1e-10);
  }
}

TEST_CASE("mean_of_invariant matches quadrature") {
  const double want[] = {std::sqrt(kPi) / 2.0, 2.0 / std::sqrt(kPi), 3.0 * std::sqrt(kPi) / 4.0,
                         8.0 / (3.0 * std::sqrt(kPi))};
  for (int i = 0; i < 4; ++i) {
    const RepulsionFamily f(2.0 + i);
    const double quad = radial_integral([&](double x) { return x * invariant_density(f, x); }, 12.0);
    CHECK(std::abs(mean_of_invariant(f) - quad) < 1e-10);
    CHECK(mean_of_invariant(f) == doctest::Approx(want[i]).epsilon(1e-14));
  }
}

TEST_CASE("unit-mean rescaling reproduces the surmises") {
  const SurmiseClass classes[] = {SurmiseClass::GOE, SurmiseClass::GUE, SurmiseClass::Ginibre,
                                  SurmiseClass::GSE};
  for (auto c : classes) {
    const RepulsionFamily f = family_of(c);
    double gap = 0.0;
    for (int i = 0; i <= 5000; ++i) {
      const double s = 1e-3 * i;
      gap = std::max(gap, std::abs(rescale_to_unit_mean(f, s) - surmise_density(c, s)));
    }
    CHECK_MESSAGE(gap < 1e-10, to_string(c) << " gap " << gap);
  }
}

TEST_CASE("unit_mean_cdf is the CDF of the rescaled density") {
  const RepulsionFamily f(3.0);
  const double quad = radial_integral([&](double s) { return rescale_to_unit_mean(f, s); }, 1.2);
  CHECK(std::abs(unit_mean_cdf(f, 1.2) - quad) < 1e-10);
}

TEST_CASE("sample_invariant moments") {
  const RepulsionFamily gue(3.0);
  const auto draws = sample_invariant_batch(gue, 11, 1'000'000);
  const auto m1 = oracle::estimate(draws, [](double x) { return x; });
  CHECK(std::abs(m1.mean - 2.0 / std::sqrt(kPi)) < 3.0 * m1.se);
  for (double n : {2.0, 4.0, 5.0, 7.5}) {
    const auto d = sample_invariant_batch(RepulsionFamily(n), 12, 200'000);
    const auto m2 = oracle::estimate(d, [](double x) { return x * x; });
    CHECK_MESSAGE(std::abs(m2.mean - n / 2.0) < 3.0 * m2.se, "n=" << n);
  }
}

TEST_CASE("sample_invariant passes a KS test against invariant_cdf") {
  for (double n : {2.0, 3.0, 5.0}) {
    const RepulsionFamily f(n);
    const auto d = sample_invariant_batch(f, 13, 100'000);
    const double stat = ks_distance(d, [&](double x) { return invariant_cdf(f, x); });
    CHECK(stat < 1.628 / std::sqrt(1e5));
  }
}

TEST_CASE("parallel and serial batch samplers are identical") {
  const RepulsionFamily f(2.5);
  const auto a = sample_invariant_batch(f, 99, 3 * kSampleBlock + 17);
  const auto b = sample_invariant_batch_serial(f, 99, 3 * kSampleBlock + 17);
  CHECK(a == b);
  Engine rng = make_stream(99, 0);
  CHECK(a.front() == sample_invariant(f, rng));
}

TEST_CASE("forward_drift") {
  CHECK(forward_drift(RepulsionFamily(3.0), 1.0) == 0.0);
  CHECK(forward_drift(RepulsionFamily(2.0), 2.0) == -1.75);
  CHECK(forward_drift(RepulsionFamily(5.0), 1.0) == 1.0);
  CHECK_THROWS_AS(forward_drift(RepulsionFamily(2.0), 0.0), DomainError);
}

TEST_CASE("drift_from_density recovers the drift family") {
  // Ornstein-Uhlenbeck: rho ~ e^{-x^2} on the whole line gives b = -x.
  const auto gauss = [](double x) { return std::exp(-x * x) / std::sqrt(kPi); };
  for (double x : {0.3, 1.0, 2.0}) CHECK(std::abs(drift_from_density(gauss, 0.5, x) + x) < 1e-9);

  const RepulsionFamily gue(3.0);
  const auto rho3 = [&](double x) { return invariant_density(gue, x); };
  CHECK(std::abs(drift_from_density(rho3, 0.5, 2.0) - -1.5) < 1e-6);
  const RepulsionFamily gse(5.0);
  const auto rho5 = [&](double x) { return invariant_density(gse, x); };
  CHECK(std::abs(drift_from_density(rho5, 0.5, 1.0) - 1.0) < 1e-6);

  for (double n : {2.0, 3.0, 4.0, 5.0}) {
    const RepulsionFamily f(n);
    const auto rho = [&](double x) { return invariant_density(f, x); };
    for (double x = 0.2; x <= 4.0; x += 0.05) {
      CHECK(std::abs(drift_from_density(rho, 0.5, x) - forward_drift(f, x)) < 1e-6);
    }
  }
  CHECK_THROWS_AS(drift_from_density([](double) { return 0.0; }, 0.5, 1.0), DomainError);
}

TEST_CASE("stationary flux of the forward equation vanishes") {
  for (double n : {2.0, 3.0, 4.0, 5.0, 7.0}) {
    const RepulsionFamily f(n);
    const auto rho = [&](double x) { return invariant_density(f, x); };
    for (double x = 0.1; x <= 5.0; x += 0.1) {
      const double flux = 0.5 * derivative(rho, x, 1e-3) - forward_drift(f, x) * rho(x);
      CHECK(std::abs(flux) < 1e-10);
    }
  }
}
