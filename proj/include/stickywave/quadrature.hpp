#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>

namespace stickywave::quadrature {

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  std::size_t intervals = 0;
};

struct Options {
  double abs_tol = 1e-10;
  std::size_t max_intervals = 1'000'000;
};

/// Globally adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
///
/// The interval with the largest local error estimate is bisected until the
/// summed estimate drops below `opts.abs_tol`. Integrable endpoint
/// singularities are fine: nodes never touch the endpoints. Throws
/// NumericalError once `opts.max_intervals` is reached without convergence.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opts = {});

/// Same as integrate(), but forces interval boundaries at the given interior
/// breakpoints (jump locations of a step integrand, kinks, ...).
Result integrate(const std::function<double(double)>& f, double a, double b,
                 std::span<const double> breakpoints, const Options& opts = {});

/// Nodes and weights of the 64-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre64 {
  std::array<double, 64> nodes;
  std::array<double, 64> weights;
};
const GaussLegendre64& gauss_legendre_64();

/// Fixed 64-point Gauss-Legendre approximation of the integral of f over [a, b].
double gauss_legendre(const std::function<double(double)>& f, double a, double b);

}  // namespace stickywave::quadrature
