#pragma once

// Scalar fluxes (through their characteristic speed lambda = flux'), multitype
// characteristic fields and the p-system in Riemann invariants.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace stickywave {

struct FluxModel {
  std::string name;
  std::function<double(double)> lambda;
  double lipschitz_const = 0.0;
  double speed_bound = 0.0;
  /// Exact n * integral of lambda over the k-th cell [(k-1)/n, k/n], k = 1..n.
  /// Empty when no closed form is registered.
  std::function<double(std::size_t, std::size_t)> exact_cell_average;

  /// Cell average with 1-based k; 64-point Gauss-Legendre when no closed form exists.
  double cell_average(std::size_t k, std::size_t n) const;
};

namespace flux {

/// "burgers" (lambda(u) = u) or "concave_lwr" (lambda(u) = 1/2 - u).
FluxModel builtin_scalar(std::string_view name);
FluxModel constant(double speed);
/// `burgers`, `concave_lwr`, `constant:c`.
FluxModel parse(std::string_view spec);

}  // namespace flux

using FieldFunction = std::function<double(std::span<const double>)>;

/// Own-coordinate cell integral of field gamma: returns n * integral over
/// w in [lo, hi] of lambda^gamma(frozen with slot gamma replaced by w), where
/// n = 1 / (hi - lo).
using OwnCellAverage =
    std::function<double(std::size_t gamma, std::span<const double> frozen, double lo, double hi)>;

/// d characteristic fields lambda^gamma : [0,1]^d -> R, type 0 fastest.
///
/// The constants are trusted as given; make_field_model() audits them on a
/// grid and reports violations on std::clog.
struct FieldModel {
  std::string name;
  std::size_t d = 0;
  std::vector<FieldFunction> lambda;
  double lipschitz_const = 0.0;
  double speed_bound = 0.0;
  double ush_gap = 0.0;
  OwnCellAverage exact_own_average;

  double eval(std::size_t gamma, std::span<const double> u) const { return lambda[gamma](u); }

  /// n * integral over the k-th cell (1-based) of lambda^gamma with its own
  /// coordinate integrated and the other coordinates taken from `frozen`.
  double cell_average(std::size_t gamma, std::span<const double> frozen, std::size_t k,
                      std::size_t n) const;
};

struct AuditReport {
  double observed_lipschitz = 0.0;
  double observed_bound = 0.0;
  /// Smallest inf lambda^gamma - sup lambda^(gamma+1) over the grid.
  double observed_ush_gap = 0.0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks the scalar constants on a regular grid of [0, 1].
AuditReport audit(const FluxModel& flux, std::size_t points = 1001);
/// Checks Lipschitz (sum form), speed bound and the USH gap on a regular grid
/// of [0, 1]^d with `points` nodes per axis.
AuditReport audit(const FieldModel& fields, std::size_t points = 21);

/// Builds a FieldModel, audits it and writes one warning line per violation to std::clog.
FieldModel make_field_model(std::string name, std::vector<FieldFunction> lambda, double lipschitz,
                            double speed_bound, double ush_gap, OwnCellAverage exact = {});

/// Isentropic gas in Riemann invariants, normalised so that g(nu) - g(0) = 1 and
/// g(nu/2) = 0. Coordinates are u[0] = w-, u[1] = w+; type 0 carries the
/// rightward field lambda- and type 1 the leftward field lambda+.
class PSystemModel {
 public:
  PSystemModel(double nu, double kappa);

  double nu() const { return nu_; }
  double kappa() const { return kappa_; }
  /// asinh(kappa / 2).
  double stretch() const { return stretch_; }
  /// Peak characteristic speed kappa / (2 nu asinh(kappa / 2)).
  double amplitude() const { return amplitude_; }

  /// Sound speed sqrt(-p'(u)).
  double sound_speed(double u) const;
  double g(double u) const;
  double g_inverse(double y) const;
  /// Infimum of the sound speed over [0, nu].
  double ell() const;

  double lambda_minus(double w_minus, double w_plus) const;
  double lambda_plus(double w_minus, double w_plus) const;

  /// (specific volume, velocity) from the Riemann invariants.
  std::pair<double, double> recover(double w_minus, double w_plus) const;

  FieldModel fields() const;

 private:
  double nu_;
  double kappa_;
  double stretch_;
  double amplitude_;
};

namespace field {

/// d >= 2 constant speeds, strictly decreasing in the type index.
FieldModel constant(std::vector<double> speeds);
/// `psystem:nu=0.5,kappa=5` or `constant:c1,c2,...`.
FieldModel parse(std::string_view spec);
/// The PSystemModel behind a `psystem:` spec; throws ValidationError otherwise.
PSystemModel parse_psystem(std::string_view spec);

}  // namespace field

}  // namespace stickywave
