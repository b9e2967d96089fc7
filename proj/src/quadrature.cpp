#include "stickywave/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include "stickywave/errors.hpp"

namespace stickywave::quadrature {
namespace {

// Kronrod abscissae on [0, 1); odd entries are the 7-point Gauss nodes.
constexpr std::array<double, 8> kKronrodNodes = {
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

Panel gauss_kronrod_15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * sum;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> breakpoints, const Options& opts) {
  if (a == b) return {};
  if (a > b) {
    Result r = integrate(f, b, a, breakpoints, opts);
    r.value = -r.value;
    return r;
  }

  std::vector<double> cuts{a};
  for (double p : breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Panel> panels;
  long double total_error = 0.0L;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Panel p = gauss_kronrod_15(f, cuts[i], cuts[i + 1]);
    total_error += p.error;
    panels.push(p);
  }

  // A panel this narrow relative to its location cannot be split meaningfully.
  auto too_narrow = [](const Panel& p) {
    const double scale = std::max({std::abs(p.a), std::abs(p.b), 1e-280});
    return p.b - p.a <= 64.0 * std::numeric_limits<double>::epsilon() * scale;
  };
  std::vector<Panel> frozen;
  long double frozen_error = 0.0L;

  while (total_error > opts.abs_tol && !panels.empty()) {
    if (panels.size() + frozen.size() >= opts.max_intervals) {
      throw NumericalError("quadrature did not converge on [" + std::to_string(a) + ", " +
                           std::to_string(b) + "]: error estimate " +
                           std::to_string(static_cast<double>(total_error)) + " after " +
                           std::to_string(opts.max_intervals) + " intervals");
    }
    Panel worst = panels.top();
    panels.pop();
    if (too_narrow(worst)) {
      frozen.push_back(worst);
      frozen_error += worst.error;
      if (frozen_error > opts.abs_tol) {
        throw NumericalError("quadrature stalled at an unresolvable point near " +
                             std::to_string(worst.a));
      }
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = gauss_kronrod_15(f, worst.a, mid);
    Panel right = gauss_kronrod_15(f, mid, worst.b);
    total_error += static_cast<long double>(left.error) + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }

  Result out;
  long double value = 0.0L;
  long double error = 0.0L;
  out.intervals = panels.size() + frozen.size();
  while (!panels.empty()) {
    value += panels.top().value;
    error += panels.top().error;
    panels.pop();
  }
  for (const Panel& p : frozen) {
    value += p.value;
    error += p.error;
  }
  out.value = static_cast<double>(value);
  out.abs_error = static_cast<double>(error);
  if (!std::isfinite(out.value)) {
    throw NumericalError("quadrature produced a non-finite value on [" + std::to_string(a) +
                         ", " + std::to_string(b) + "]");
  }
  return out;
}

Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opts) {
  return integrate(f, a, b, std::span<const double>{}, opts);
}

const GaussLegendre64& gauss_legendre_64() {
  static const GaussLegendre64 rule = [] {
    constexpr int n = 64;
    GaussLegendre64 r{};
    for (int i = 0; i < n / 2; ++i) {
      // Newton iteration on P_n from the Tricomi initial guess.
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double step = p1 / dp;
        x -= step;
        if (std::abs(step) < 1e-16) break;
      }
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      r.nodes[i] = -x;
      r.nodes[n - 1 - i] = x;
      r.weights[i] = w;
      r.weights[n - 1 - i] = w;
    }
    return r;
  }();
  return rule;
}

double gauss_legendre(const std::function<double(double)>& f, double a, double b) {
  const auto& rule = gauss_legendre_64();
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(center + half * rule.nodes[i]);
  }
  return sum * half;
}

}  // namespace stickywave::quadrature
