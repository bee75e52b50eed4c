#include "levelflow/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "levelflow/errors.hpp"

namespace levelflow {

namespace {

// Kronrod nodes on [-1, 1]; odd indices are the embedded Gauss nodes.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kNodes[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * sum;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureOptions& options) {
  if (!(b >= a)) throw DomainError("integrate", "interval must satisfy a <= b");
  if (a == b) return {0.0, 0.0, 0, true};

  const int initial = std::max(1, options.initial_panels);
  std::vector<Panel> panels;
  panels.reserve(static_cast<std::size_t>(initial));
  double value = 0.0;
  double error = 0.0;
  for (int i = 0; i < initial; ++i) {
    const double lo = a + (b - a) * i / initial;
    const double hi = i + 1 == initial ? b : a + (b - a) * (i + 1) / initial;
    panels.push_back(gauss_kronrod(f, lo, hi));
    value += panels.back().value;
    error += panels.back().error;
  }
  std::make_heap(panels.begin(), panels.end());
  const int max_intervals = std::max(options.max_intervals, initial);

  const auto resum = [&] {
    value = 0.0;
    error = 0.0;
    for (const Panel& p : panels) {
      value += p.value;
      error += p.error;
    }
  };

  while (true) {
    const double tolerance = std::max(options.abs_tol, options.rel_tol * std::abs(value));
    if (error <= tolerance) {
      resum();
      if (error <= std::max(options.abs_tol, options.rel_tol * std::abs(value))) {
        return {value, error, static_cast<int>(panels.size()), true};
      }
    }
    if (static_cast<int>(panels.size()) >= max_intervals) break;

    std::pop_heap(panels.begin(), panels.end());
    const Panel worst = panels.back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {  // interval exhausted
      std::push_heap(panels.begin(), panels.end());
      break;
    }
    panels.pop_back();
    const Panel left = gauss_kronrod(f, worst.a, mid);
    const Panel right = gauss_kronrod(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push_back(left);
    std::push_heap(panels.begin(), panels.end());
    panels.push_back(right);
    std::push_heap(panels.begin(), panels.end());
  }

  resum();
  return {value, error, static_cast<int>(panels.size()), false};
}

}  // namespace levelflow
