#include "stickywave/flux_models.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>

#include "stickywave/errors.hpp"
#include "stickywave/numerics.hpp"
#include "stickywave/quadrature.hpp"

namespace stickywave {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

double cell_lo(std::size_t k, std::size_t n) {
  return static_cast<double>(k - 1) / static_cast<double>(n);
}
double cell_hi(std::size_t k, std::size_t n) {
  return static_cast<double>(k) / static_cast<double>(n);
}

// Gudermannian function, the antiderivative of sech.
double gd(double y) { return std::atan(std::sinh(y)); }

}  // namespace

double FluxModel::cell_average(std::size_t k, std::size_t n) const {
  if (k == 0 || k > n) throw ValidationError("cell index out of range");
  if (exact_cell_average) return exact_cell_average(k, n);
  return static_cast<double>(n) * quadrature::gauss_legendre(lambda, cell_lo(k, n), cell_hi(k, n));
}

namespace flux {

FluxModel builtin_scalar(std::string_view name) {
  FluxModel f;
  if (name == "burgers") {
    f.name = "burgers";
    f.lambda = [](double u) { return u; };
    f.lipschitz_const = 1.0;
    f.speed_bound = 1.0;
    f.exact_cell_average = [](std::size_t k, std::size_t n) {
      return static_cast<double>(2 * k - 1) / static_cast<double>(2 * n);
    };
    return f;
  }
  if (name == "concave_lwr") {
    f.name = "concave_lwr";
    f.lambda = [](double u) { return 0.5 - u; };
    f.lipschitz_const = 1.0;
    f.speed_bound = 0.5;
    f.exact_cell_average = [](std::size_t k, std::size_t n) {
      return 0.5 - static_cast<double>(2 * k - 1) / static_cast<double>(2 * n);
    };
    return f;
  }
  throw ValidationError("unknown scalar flux '" + std::string(name) + "'");
}

FluxModel constant(double speed) {
  if (!std::isfinite(speed)) throw ValidationError("constant flux speed must be finite");
  FluxModel f;
  f.name = "constant:" + fmt(speed);
  f.lambda = [speed](double) { return speed; };
  f.lipschitz_const = 0.0;
  f.speed_bound = std::abs(speed);
  f.exact_cell_average = [speed](std::size_t, std::size_t) { return speed; };
  return f;
}

FluxModel parse(std::string_view spec) {
  if (spec.rfind("constant:", 0) == 0) {
    return constant(parse_double(spec.substr(9), spec));
  }
  return builtin_scalar(spec);
}

}  // namespace flux

double FieldModel::cell_average(std::size_t gamma, std::span<const double> frozen, std::size_t k,
                                std::size_t n) const {
  if (k == 0 || k > n) throw ValidationError("cell index out of range");
  const double lo = cell_lo(k, n);
  const double hi = cell_hi(k, n);
  if (exact_own_average) return exact_own_average(gamma, frozen, lo, hi);
  std::vector<double> u(frozen.begin(), frozen.end());
  auto along_own = [&](double w) {
    u[gamma] = w;
    return lambda[gamma](u);
  };
  return static_cast<double>(n) * quadrature::gauss_legendre(along_own, lo, hi);
}

AuditReport audit(const FluxModel& flux, std::size_t points) {
  AuditReport report;
  const double h = 1.0 / static_cast<double>(points - 1);
  double prev = flux.lambda(0.0);
  report.observed_bound = std::abs(prev);
  for (std::size_t i = 1; i < points; ++i) {
    const double cur = flux.lambda(static_cast<double>(i) * h);
    report.observed_bound = std::max(report.observed_bound, std::abs(cur));
    report.observed_lipschitz = std::max(report.observed_lipschitz, std::abs(cur - prev) / h);
    prev = cur;
  }
  const double slack = 1e-9 * (1.0 + flux.speed_bound + flux.lipschitz_const);
  if (report.observed_lipschitz > flux.lipschitz_const + slack) {
    report.violations.push_back("flux '" + flux.name + "': observed Lipschitz constant " +
                                fmt(report.observed_lipschitz) + " exceeds declared " +
                                fmt(flux.lipschitz_const));
  }
  if (report.observed_bound > flux.speed_bound + slack) {
    report.violations.push_back("flux '" + flux.name + "': observed speed " +
                                fmt(report.observed_bound) + " exceeds declared bound " +
                                fmt(flux.speed_bound));
  }
  report.observed_ush_gap = std::numeric_limits<double>::infinity();
  return report;
}

AuditReport audit(const FieldModel& fields, std::size_t points) {
  AuditReport report;
  const std::size_t d = fields.d;
  const double h = 1.0 / static_cast<double>(points - 1);
  std::size_t total = 1;
  for (std::size_t g = 0; g < d; ++g) total *= points;

  std::vector<double> inf_speed(d, std::numeric_limits<double>::infinity());
  std::vector<double> sup_speed(d, -std::numeric_limits<double>::infinity());
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> u(d, 0.0);
  std::vector<double> v(d, 0.0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rest = flat;
    for (std::size_t g = 0; g < d; ++g) {
      idx[g] = rest % points;
      rest /= points;
      u[g] = static_cast<double>(idx[g]) * h;
    }
    for (std::size_t gamma = 0; gamma < d; ++gamma) {
      const double here = fields.lambda[gamma](u);
      inf_speed[gamma] = std::min(inf_speed[gamma], here);
      sup_speed[gamma] = std::max(sup_speed[gamma], here);
      report.observed_bound = std::max(report.observed_bound, std::abs(here));
      for (std::size_t axis = 0; axis < d; ++axis) {
        if (idx[axis] + 1 == points) continue;
        v = u;
        v[axis] += h;
        const double slope = std::abs(fields.lambda[gamma](v) - here) / h;
        report.observed_lipschitz = std::max(report.observed_lipschitz, slope);
      }
    }
  }
  report.observed_ush_gap = std::numeric_limits<double>::infinity();
  for (std::size_t gamma = 0; gamma + 1 < d; ++gamma) {
    report.observed_ush_gap =
        std::min(report.observed_ush_gap, inf_speed[gamma] - sup_speed[gamma + 1]);
  }

  const double slack = 1e-9 * (1.0 + fields.speed_bound + fields.lipschitz_const);
  if (report.observed_lipschitz > fields.lipschitz_const + slack) {
    report.violations.push_back("field '" + fields.name + "': observed Lipschitz constant " +
                                fmt(report.observed_lipschitz) + " exceeds declared " +
                                fmt(fields.lipschitz_const));
  }
  if (report.observed_bound > fields.speed_bound + slack) {
    report.violations.push_back("field '" + fields.name + "': observed speed " +
                                fmt(report.observed_bound) + " exceeds declared bound " +
                                fmt(fields.speed_bound));
  }
  if (!(fields.ush_gap > 0.0) || report.observed_ush_gap < fields.ush_gap - slack) {
    report.violations.push_back("field '" + fields.name + "': USH gap " +
                                fmt(report.observed_ush_gap) + " on the grid, declared " +
                                fmt(fields.ush_gap));
  }
  return report;
}

FieldModel make_field_model(std::string name, std::vector<FieldFunction> lambda, double lipschitz,
                            double speed_bound, double ush_gap, OwnCellAverage exact) {
  if (lambda.size() < 2) throw ValidationError("a field model needs at least two types");
  FieldModel f;
  f.name = std::move(name);
  f.d = lambda.size();
  f.lambda = std::move(lambda);
  f.lipschitz_const = lipschitz;
  f.speed_bound = speed_bound;
  f.ush_gap = ush_gap;
  f.exact_own_average = std::move(exact);
  const std::size_t points = f.d <= 2 ? 41 : (f.d == 3 ? 15 : 7);
  for (const std::string& line : audit(f, points).violations) {
    std::clog << "warning: " << line << '\n';
  }
  return f;
}

PSystemModel::PSystemModel(double nu, double kappa) : nu_(nu), kappa_(kappa) {
  if (!(nu > 0.0) || !(kappa > 0.0) || !std::isfinite(nu) || !std::isfinite(kappa)) {
    throw ValidationError("p-system needs nu > 0 and kappa > 0");
  }
  stretch_ = std::asinh(0.5 * kappa_);
  amplitude_ = kappa_ / (2.0 * nu_ * stretch_);
}

double PSystemModel::sound_speed(double u) const {
  const double z = kappa_ * (u / nu_ - 0.5);
  return (kappa_ / nu_) / (2.0 * stretch_ * std::sqrt(1.0 + z * z));
}

double PSystemModel::g(double u) const {
  return std::asinh(kappa_ * (u / nu_ - 0.5)) / (2.0 * stretch_);
}

double PSystemModel::g_inverse(double y) const {
  return nu_ * (0.5 + std::sinh(2.0 * stretch_ * y) / kappa_);
}

double PSystemModel::ell() const { return amplitude_ / std::sqrt(1.0 + 0.25 * kappa_ * kappa_); }

double PSystemModel::lambda_minus(double w_minus, double w_plus) const {
  return amplitude_ / std::cosh((w_plus - w_minus) * stretch_);
}

double PSystemModel::lambda_plus(double w_minus, double w_plus) const {
  return -amplitude_ / std::cosh((w_plus - w_minus) * stretch_);
}

std::pair<double, double> PSystemModel::recover(double w_minus, double w_plus) const {
  const double u = nu_ * (0.5 + std::sinh((w_plus - w_minus) * stretch_) / kappa_);
  return {u, 0.5 * (w_plus + w_minus)};
}

FieldModel PSystemModel::fields() const {
  const double a = amplitude_;
  const double s = stretch_;
  std::vector<FieldFunction> lambda{
      [a, s](std::span<const double> u) { return a / std::cosh((u[1] - u[0]) * s); },
      [a, s](std::span<const double> u) { return -a / std::cosh((u[1] - u[0]) * s); }};
  // |d/dw (a sech(w s))| = a s sinh/cosh^2, maximal (= a s / 2) where sinh = 1
  // when that point lies inside |w s| <= s.
  const double peak = s >= std::asinh(1.0) ? 0.5 : std::sinh(s) / (std::cosh(s) * std::cosh(s));
  OwnCellAverage exact = [a, s](std::size_t gamma, std::span<const double> frozen, double lo,
                                double hi) {
    const double width = hi - lo;
    if (gamma == 0) {
      const double wp = frozen[1];
      return a * (gd((wp - lo) * s) - gd((wp - hi) * s)) / (s * width);
    }
    const double wm = frozen[0];
    return -a * (gd((hi - wm) * s) - gd((lo - wm) * s)) / (s * width);
  };
  std::ostringstream name;
  name.precision(17);
  name << "psystem:nu=" << nu_ << ",kappa=" << kappa_;
  return make_field_model(name.str(), std::move(lambda), a * s * peak, a, 2.0 * ell(),
                          std::move(exact));
}

namespace field {

FieldModel constant(std::vector<double> speeds) {
  if (speeds.size() < 2) throw ValidationError("constant field needs at least two speeds");
  double gap = std::numeric_limits<double>::infinity();
  double bound = 0.0;
  std::string name = "constant:";
  for (std::size_t g = 0; g < speeds.size(); ++g) {
    if (!std::isfinite(speeds[g])) throw ValidationError("constant field speeds must be finite");
    if (g > 0) gap = std::min(gap, speeds[g - 1] - speeds[g]);
    bound = std::max(bound, std::abs(speeds[g]));
    name += (g ? "," : "") + fmt(speeds[g]);
  }
  if (!(gap > 0.0)) {
    throw ValidationError("constant field speeds must be strictly decreasing in the type index");
  }
  std::vector<FieldFunction> lambda;
  for (double c : speeds) lambda.push_back([c](std::span<const double>) { return c; });
  OwnCellAverage exact = [speeds](std::size_t gamma, std::span<const double>, double, double) {
    return speeds[gamma];
  };
  return make_field_model(std::move(name), std::move(lambda), 0.0, bound, gap, std::move(exact));
}

PSystemModel parse_psystem(std::string_view spec) {
  if (spec.rfind("psystem:", 0) != 0) {
    throw ValidationError("not a p-system spec: '" + std::string(spec) + "'");
  }
  std::string_view body = spec.substr(8);
  double nu = 0.5;
  double kappa = 5.0;
  while (!body.empty()) {
    const std::size_t comma = body.find(',');
    const std::string_view item = body.substr(0, comma);
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("expected key=value in '" + std::string(spec) + "'");
    }
    const std::string_view key = item.substr(0, eq);
    const double value = parse_double(item.substr(eq + 1), spec);
    if (key == "nu") {
      nu = value;
    } else if (key == "kappa") {
      kappa = value;
    } else {
      throw ValidationError("unknown p-system parameter '" + std::string(key) + "'");
    }
    if (comma == std::string_view::npos) break;
    body.remove_prefix(comma + 1);
  }
  return PSystemModel(nu, kappa);
}

FieldModel parse(std::string_view spec) {
  if (spec.rfind("psystem", 0) == 0) {
    if (spec == "psystem") return PSystemModel(0.5, 5.0).fields();
    return parse_psystem(spec).fields();
  }
  if (spec.rfind("constant:", 0) == 0) return constant(parse_double_list(spec.substr(9), spec));
  throw ValidationError("unknown field spec '" + std::string(spec) + "'");
}

}  // namespace field

}  // namespace stickywave
