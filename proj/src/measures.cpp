#include "stickywave/measures.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "stickywave/errors.hpp"
#include "stickywave/numerics.hpp"
#include "stickywave/quadrature.hpp"

namespace stickywave {

DiscreteMeasure::DiscreteMeasure(std::vector<double> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw ValidationError("DiscreteMeasure needs at least one atom");
  for (std::size_t k = 0; k < atoms_.size(); ++k) {
    if (!std::isfinite(atoms_[k])) throw ValidationError("DiscreteMeasure atoms must be finite");
    if (k > 0 && atoms_[k] < atoms_[k - 1]) {
      throw ValidationError("DiscreteMeasure atoms must be sorted nondecreasing");
    }
  }
}

namespace measures {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// Quantile of a purely atomic law: value xs[i] on (cum[i-1], cum[i]].
struct StepQuantile {
  std::vector<double> xs;
  std::vector<double> cum;

  double quantile(double v) const {
    if (v <= 0.0) return xs.front();
    const auto it = std::lower_bound(cum.begin(), cum.end(), v);
    if (it == cum.end()) return xs.back();
    return xs[static_cast<std::size_t>(it - cum.begin())];
  }
  double cdf(double x) const {
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    if (it == xs.begin()) return 0.0;
    return cum[static_cast<std::size_t>(it - xs.begin()) - 1];
  }
  double integral(double a, double b) const {
    CompensatedSum s;
    double left = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double lo = std::max(a, left);
      const double hi = std::min(b, cum[i]);
      if (hi > lo) s.add(xs[i] * (hi - lo));
      left = cum[i];
      if (left >= b) break;
    }
    return s.value();
  }
};

Measure1D from_steps(std::string label, std::shared_ptr<const StepQuantile> q) {
  Measure1D m;
  m.label = std::move(label);
  m.cdf = [q](double x) { return q->cdf(x); };
  m.quantile = [q](double v) { return q->quantile(v); };
  m.quantile_integral = [q](double a, double b) { return q->integral(a, b); };
  m.support_hint = Interval{q->xs.front(), q->xs.back()};
  m.quantile_breakpoints.assign(q->cum.begin(), q->cum.end() - 1);
  return m;
}

// u log(2u) - u, extended by continuity at u = 0.
double laplace_primitive(double u) { return u > 0.0 ? u * std::log(2.0 * u) - u : 0.0; }

std::vector<double> parse_numbers(std::string_view text, std::string_view spec) {
  return parse_double_list(text, spec);
}

std::vector<std::pair<double, double>> parse_pairs(std::string_view text, std::string_view spec) {
  std::vector<std::pair<double, double>> out;
  while (!text.empty()) {
    const std::size_t comma = text.find(',');
    const std::string_view token = text.substr(0, comma);
    const std::size_t at = token.find('@');
    if (at == std::string_view::npos) {
      throw ValidationError("expected 'x@w' but got '" + std::string(token) + "' in measure spec '" +
                            std::string(spec) + "'");
    }
    const auto left = parse_numbers(token.substr(0, at), spec);
    const auto right = parse_numbers(token.substr(at + 1), spec);
    if (left.size() != 1 || right.size() != 1) {
      throw ValidationError("malformed pair '" + std::string(token) + "' in measure spec '" +
                            std::string(spec) + "'");
    }
    out.emplace_back(left[0], right[0]);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

void expect_count(const std::vector<double>& args, std::size_t count, std::string_view spec) {
  if (args.size() != count) {
    throw ValidationError("measure spec '" + std::string(spec) + "' expects " +
                          std::to_string(count) + " parameter(s)");
  }
}

}  // namespace

Measure1D uniform(double a, double b) {
  if (!(std::isfinite(a) && std::isfinite(b) && a < b)) {
    throw ValidationError("uniform measure needs finite a < b, got [" + fmt(a) + ", " + fmt(b) + "]");
  }
  Measure1D m;
  m.label = "uniform:" + fmt(a) + "," + fmt(b);
  const double width = b - a;
  m.cdf = [a, width](double x) { return std::clamp((x - a) / width, 0.0, 1.0); };
  m.quantile = [a, width](double v) { return a + width * std::clamp(v, 0.0, 1.0); };
  m.quantile_complement = [b, width](double w) { return b - width * std::clamp(w, 0.0, 1.0); };
  m.quantile_integral = [a, width](double lo, double hi) {
    return (hi - lo) * (a + 0.5 * width * (lo + hi));
  };
  m.support_hint = Interval{a, b};
  return m;
}

Measure1D dirac(double c) {
  if (!std::isfinite(c)) throw ValidationError("dirac location must be finite");
  Measure1D m;
  m.label = "heaviside:" + fmt(c);
  m.cdf = [c](double x) { return x >= c ? 1.0 : 0.0; };
  m.quantile = [c](double) { return c; };
  m.quantile_integral = [c](double lo, double hi) { return c * (hi - lo); };
  m.support_hint = Interval{c, c};
  m.atom_list = {{c, 1.0}};
  return m;
}

Measure1D atoms(std::vector<std::pair<double, double>> locations_and_weights) {
  if (locations_and_weights.empty()) throw ValidationError("atoms measure needs at least one atom");
  std::sort(locations_and_weights.begin(), locations_and_weights.end());
  auto q = std::make_shared<StepQuantile>();
  double total = 0.0;
  std::string label = "atoms:";
  for (const auto& [x, w] : locations_and_weights) {
    if (!std::isfinite(x) || !(w > 0.0)) {
      throw ValidationError("atoms need finite locations and positive weights");
    }
    label += (label.back() == ':' ? "" : ",") + fmt(x) + "@" + fmt(w);
    total += w;
    if (!q->xs.empty() && q->xs.back() == x) {
      q->cum.back() = total;
    } else {
      q->xs.push_back(x);
      q->cum.push_back(total);
    }
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ValidationError("atom weights must sum to 1, got " + fmt(total));
  }
  q->cum.back() = 1.0;
  std::vector<std::pair<double, double>> merged;
  double previous = 0.0;
  for (std::size_t i = 0; i < q->xs.size(); ++i) {
    merged.emplace_back(q->xs[i], q->cum[i] - previous);
    previous = q->cum[i];
  }
  Measure1D m = from_steps(std::move(label), std::move(q));
  m.atom_list = std::move(merged);
  return m;
}

Measure1D laplace(double location, double scale) {
  if (!std::isfinite(location) || !(scale > 0.0) || !std::isfinite(scale)) {
    throw ValidationError("laplace needs a finite location and a positive scale");
  }
  Measure1D m;
  m.label = "laplace:" + fmt(location) + "," + fmt(scale);
  m.cdf = [location, scale](double x) {
    const double z = (x - location) / scale;
    return z < 0.0 ? 0.5 * std::exp(z) : 1.0 - 0.5 * std::exp(-z);
  };
  m.quantile = [location, scale](double v) {
    if (v <= 0.0) return -kInf;
    if (v >= 1.0) return kInf;
    return v <= 0.5 ? location + scale * std::log(2.0 * v)
                    : location - scale * std::log(2.0 * (1.0 - v));
  };
  m.quantile_complement = [location, scale](double w) {
    if (w <= 0.0) return kInf;
    if (w >= 1.0) return -kInf;
    return w <= 0.5 ? location - scale * std::log(2.0 * w)
                    : location + scale * std::log(2.0 * (1.0 - w));
  };
  m.quantile_integral = [location, scale](double a, double b) {
    double lower = 0.0;
    if (a < 0.5) {
      const double hi = std::min(b, 0.5);
      lower = laplace_primitive(hi) - laplace_primitive(a);
    }
    double upper = 0.0;
    if (b > 0.5) {
      const double lo = std::max(a, 0.5);
      upper = -(laplace_primitive(1.0 - lo) - laplace_primitive(1.0 - b));
    }
    return location * (b - a) + scale * (lower + upper);
  };
  m.quantile_breakpoints = {0.5};
  return m;
}

Measure1D pareto(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ValidationError("pareto needs alpha > 0");
  Measure1D m;
  m.label = "pareto:" + fmt(alpha);
  m.cdf = [alpha](double x) { return x <= 1.0 ? 0.0 : -std::expm1(-alpha * std::log(x)); };
  m.quantile = [alpha](double v) {
    if (v <= 0.0) return 1.0;
    if (v >= 1.0) return kInf;
    return std::exp(-std::log1p(-v) / alpha);
  };
  m.quantile_complement = [alpha](double w) {
    if (w <= 0.0) return kInf;
    if (w >= 1.0) return 1.0;
    return std::pow(w, -1.0 / alpha);
  };
  m.quantile_integral = [alpha](double a, double b) {
    const double ua = 1.0 - a;
    const double ub = 1.0 - b;
    if (alpha == 1.0) return ub > 0.0 ? std::log(ua / ub) : kInf;
    const double beta = 1.0 - 1.0 / alpha;
    if (beta < 0.0 && ub <= 0.0) return kInf;
    return (std::pow(ua, beta) - std::pow(ub, beta)) / beta;
  };
  m.first_moment_finite = alpha > 1.0;
  return m;
}

Measure1D stretched_exponential(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ValidationError("stretched exponential needs alpha > 0");
  }
  Measure1D m;
  m.label = "stretchedexp:" + fmt(alpha);
  m.cdf = [alpha](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-std::pow(x, alpha)); };
  m.quantile = [alpha](double v) {
    if (v <= 0.0) return 0.0;
    if (v >= 1.0) return kInf;
    return std::pow(-std::log1p(-v), 1.0 / alpha);
  };
  m.quantile_complement = [alpha](double w) {
    if (w <= 0.0) return kInf;
    if (w >= 1.0) return 0.0;
    return std::pow(-std::log(w), 1.0 / alpha);
  };
  // With s = -log(1 - v), the integral of the quantile is the incomplete gamma
  // function of order 1 + 1/alpha evaluated between the two s values.
  m.quantile_integral = [alpha](double a, double b) {
    const double order = 1.0 + 1.0 / alpha;
    const double sa = -std::log1p(-a);
    const double sb = b >= 1.0 ? kInf : -std::log1p(-b);
    if (sa > order) {
      const double tail_b = std::isinf(sb) ? 0.0 : boost::math::tgamma(order, sb);
      return boost::math::tgamma(order, sa) - tail_b;
    }
    const double head_b =
        std::isinf(sb) ? boost::math::tgamma(order) : boost::math::tgamma_lower(order, sb);
    return head_b - boost::math::tgamma_lower(order, sa);
  };
  return m;
}

Measure1D piecewise_linear_cdf(std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) throw ValidationError("pwl CDF needs at least two knots");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const auto [x, f] = knots[i];
    if (!std::isfinite(x) || !std::isfinite(f) || f < 0.0 || f > 1.0) {
      throw ValidationError("pwl CDF knots need finite x and F in [0, 1]");
    }
    if (i > 0 && !(x > knots[i - 1].first)) {
      throw ValidationError("pwl CDF knot positions must be strictly increasing");
    }
    if (i > 0 && f < knots[i - 1].second) throw ValidationError("pwl CDF values must be nondecreasing");
  }
  if (knots.front().second != 0.0 || knots.back().second != 1.0) {
    throw ValidationError("pwl CDF must start at F = 0 and end at F = 1");
  }
  auto xs = std::make_shared<std::vector<double>>();
  auto fs = std::make_shared<std::vector<double>>();
  std::string label = "pwl:";
  for (const auto& [x, f] : knots) {
    label += (xs->empty() ? "" : ",") + fmt(x) + "@" + fmt(f);
    xs->push_back(x);
    fs->push_back(f);
  }

  Measure1D m;
  m.label = std::move(label);
  m.cdf = [xs, fs](double x) {
    if (x <= xs->front()) return 0.0;
    if (x >= xs->back()) return 1.0;
    const auto i = static_cast<std::size_t>(std::upper_bound(xs->begin(), xs->end(), x) - xs->begin());
    const double t = (x - (*xs)[i - 1]) / ((*xs)[i] - (*xs)[i - 1]);
    return (*fs)[i - 1] + t * ((*fs)[i] - (*fs)[i - 1]);
  };
  // Segment i (knots i-1, i) carries the quantile on (F[i-1], F[i]].
  auto quantile = [xs, fs](double v) {
    if (v <= 0.0) {
      std::size_t j = 0;
      while (j + 1 < fs->size() && (*fs)[j + 1] == 0.0) ++j;
      return (*xs)[j];
    }
    if (v >= 1.0) return xs->back();
    const auto i = static_cast<std::size_t>(std::lower_bound(fs->begin(), fs->end(), v) - fs->begin());
    const double t = (v - (*fs)[i - 1]) / ((*fs)[i] - (*fs)[i - 1]);
    return (*xs)[i - 1] + t * ((*xs)[i] - (*xs)[i - 1]);
  };
  m.quantile = quantile;
  m.quantile_integral = [xs, fs](double a, double b) {
    CompensatedSum s;
    for (std::size_t i = 1; i < fs->size(); ++i) {
      const double f0 = (*fs)[i - 1];
      const double f1 = (*fs)[i];
      const double lo = std::max(a, f0);
      const double hi = std::min(b, f1);
      if (!(hi > lo)) continue;
      const double slope = ((*xs)[i] - (*xs)[i - 1]) / (f1 - f0);
      const double q_lo = (*xs)[i - 1] + (lo - f0) * slope;
      const double q_hi = (*xs)[i - 1] + (hi - f0) * slope;
      s.add(0.5 * (hi - lo) * (q_lo + q_hi));
    }
    return s.value();
  };
  m.support_hint = Interval{xs->front(), xs->back()};
  for (std::size_t i = 1; i + 1 < fs->size(); ++i) {
    if ((*fs)[i] > 0.0 && (*fs)[i] < 1.0) m.quantile_breakpoints.push_back((*fs)[i]);
  }
  m.quantile_breakpoints.erase(
      std::unique(m.quantile_breakpoints.begin(), m.quantile_breakpoints.end()),
      m.quantile_breakpoints.end());
  return m;
}

Measure1D from_discrete(const DiscreteMeasure& mu) {
  auto q = std::make_shared<StepQuantile>();
  const std::size_t n = mu.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double cum = static_cast<double>(k + 1) / static_cast<double>(n);
    if (!q->xs.empty() && q->xs.back() == mu[k]) {
      q->cum.back() = cum;
    } else {
      q->xs.push_back(mu[k]);
      q->cum.push_back(cum);
    }
  }
  return from_steps("discrete:n=" + std::to_string(n), std::move(q));
}

Measure1D parse(std::string_view spec) {
  const std::size_t colon = spec.find(':');
  if (colon == std::string_view::npos) {
    throw ValidationError("measure spec '" + std::string(spec) + "' lacks a ':' separator");
  }
  const std::string_view name = spec.substr(0, colon);
  const std::string_view body = spec.substr(colon + 1);
  if (name == "uniform") {
    const auto args = parse_numbers(body, spec);
    expect_count(args, 2, spec);
    return uniform(args[0], args[1]);
  }
  if (name == "laplace") {
    const auto args = parse_numbers(body, spec);
    expect_count(args, 2, spec);
    return laplace(args[0], args[1]);
  }
  if (name == "pareto") {
    const auto args = parse_numbers(body, spec);
    expect_count(args, 1, spec);
    return pareto(args[0]);
  }
  if (name == "stretchedexp") {
    const auto args = parse_numbers(body, spec);
    expect_count(args, 1, spec);
    return stretched_exponential(args[0]);
  }
  if (name == "heaviside" || name == "dirac") {
    const auto args = parse_numbers(body, spec);
    expect_count(args, 1, spec);
    return dirac(args[0]);
  }
  if (name == "atoms") return atoms(parse_pairs(body, spec));
  if (name == "pwl") return piecewise_linear_cdf(parse_pairs(body, spec));
  throw ValidationError("unknown measure family '" + std::string(name) + "'");
}

}  // namespace measures

namespace {

std::vector<double> merged_breakpoints(const Measure1D& a, const Measure1D& b) {
  std::vector<double> out = a.quantile_breakpoints;
  out.insert(out.end(), b.quantile_breakpoints.begin(), b.quantile_breakpoints.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double quantile_integral(const Measure1D& m, double a, double b, double abs_tol) {
  if (!(b > a)) return 0.0;
  if (m.quantile_integral) return m.quantile_integral(a, b);
  return quadrature::integrate(m.quantile, a, b, m.quantile_breakpoints, {.abs_tol = abs_tol}).value;
}

}  // namespace

double quantile_abs_deviation(const Measure1D& m, double a, double b, double c, double abs_tol) {
  if (!(b > a)) return 0.0;
  // quantile(v) <= c exactly when v <= F(c).
  const double split = std::clamp(m.cdf(c), a, b);
  if (m.quantile_integral) {
    const double below = c * (split - a) - m.quantile_integral(a, split);
    const double above = m.quantile_integral(split, b) - c * (b - split);
    return std::max(0.0, below) + std::max(0.0, above);
  }
  auto dev = [&m, c](double v) { return std::abs(m.quantile(v) - c); };
  std::vector<double> cuts = m.quantile_breakpoints;
  cuts.push_back(split);
  return quadrature::integrate(dev, a, b, cuts, {.abs_tol = abs_tol}).value;
}

double w1(const Measure1D& m, const DiscreteMeasure& mu, double abs_tol) {
  if (!m.first_moment_finite) return kInfiniteDistance;
  const std::size_t n = mu.size();
  const double cell_tol = abs_tol / static_cast<double>(n);
  CompensatedSum total;
  for (std::size_t k = 0; k < n; ++k) {
    const double lo = static_cast<double>(k) / static_cast<double>(n);
    const double hi = static_cast<double>(k + 1) / static_cast<double>(n);
    total.add(quantile_abs_deviation(m, lo, hi, mu[k], cell_tol));
  }
  return total.value();
}

double w1(const DiscreteMeasure& mu, const Measure1D& m, double abs_tol) { return w1(m, mu, abs_tol); }

double w1(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  // Common refinement of the grids k/na and j/nb, in integer units of 1/(na nb).
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  CompensatedSum total;
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t pos = 0;
  while (i < na && j < nb) {
    const std::size_t end_a = (i + 1) * nb;
    const std::size_t end_b = (j + 1) * na;
    const std::size_t end = std::min(end_a, end_b);
    total.add(std::abs(a[i] - b[j]) * static_cast<double>(end - pos));
    pos = end;
    if (end == end_a) ++i;
    if (end == end_b) ++j;
  }
  return total.value() / (static_cast<double>(na) * static_cast<double>(nb));
}

double w1(const Measure1D& a, const Measure1D& b, double abs_tol) {
  if (a.first_moment_finite != b.first_moment_finite) return kInfiniteDistance;
  const auto cuts = merged_breakpoints(a, b);
  std::vector<double> lower_cuts;
  std::vector<double> upper_cuts;
  for (double v : cuts) {
    if (v < 0.5) lower_cuts.push_back(v);
    if (v > 0.5) upper_cuts.push_back(1.0 - v);
  }
  // Lower half in v, upper half in w = 1 - v, so both tails sit at an
  // endpoint where double spacing is fine.
  auto lower = [&](double v) { return std::abs(a.quantile(v) - b.quantile(v)); };
  auto upper = [&](double w) { return std::abs(a.quantile_upper(w) - b.quantile_upper(w)); };
  const quadrature::Options opts{.abs_tol = 0.5 * abs_tol};
  return quadrature::integrate(lower, 0.0, 0.5, lower_cuts, opts).value +
         quadrature::integrate(upper, 0.0, 0.5, upper_cuts, opts).value;
}

DiscreteMeasure optimal_quantize(const Measure1D& m, std::size_t n) {
  if (n == 0) throw ValidationError("optimal_quantize needs n >= 1");
  std::vector<double> x(n);
  const double two_n = 2.0 * static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t odd = 2 * k + 1;
    // Upper half through the complement avoids rounding 1 - v.
    x[k] = (2 * odd > 2 * n) ? m.quantile_upper(static_cast<double>(2 * n - odd) / two_n)
                             : m.quantile(static_cast<double>(odd) / two_n);
    if (!std::isfinite(x[k])) {
      throw NumericalError("quantile of '" + m.label + "' is not finite at level " +
                           std::to_string(static_cast<double>(odd) / two_n));
    }
  }
  for (std::size_t k = 1; k < n; ++k) x[k] = std::max(x[k], x[k - 1]);
  return DiscreteMeasure(std::move(x));
}

DiscreteMeasure chi_quantize(const Measure1D& m, std::size_t n) {
  if (n == 0) throw ValidationError("chi_quantize needs n >= 1");
  if (!m.first_moment_finite) {
    throw ValidationError("chi_quantize needs a finite first moment ('" + m.label + "')");
  }
  std::vector<double> x(n);
  const double denom = 2.0 * static_cast<double>(n + 1);
  for (std::size_t k = 0; k < n; ++k) {
    const double lo = static_cast<double>(2 * k + 1) / denom;
    const double hi = static_cast<double>(2 * k + 3) / denom;
    x[k] = static_cast<double>(n + 1) * quantile_integral(m, lo, hi, 1e-10);
    if (!std::isfinite(x[k])) {
      throw NumericalError("chi_quantize: window integral of '" + m.label + "' is not finite");
    }
  }
  for (std::size_t k = 1; k < n; ++k) x[k] = std::max(x[k], x[k - 1]);
  return DiscreteMeasure(std::move(x));
}

namespace {

// Integral of sqrt(F(1 - F)) over the x-range between the quantiles at levels
// eps and 1 - eps. With v = sin^2(theta) the weight sqrt(v(1 - v)) becomes
// sin(2 theta)/2, and integrating by parts against the quantile leaves
//   h(v_b) Q(v_b) - h(v_a) Q(v_a) - integral of Q(sin^2 theta) cos(2 theta).
double truncated_sqrt_integral(const Measure1D& m, double eps) {
  const double theta_lo = std::asin(std::sqrt(eps));
  std::vector<double> lower_cuts;
  std::vector<double> upper_cuts;
  for (double v : m.quantile_breakpoints) {
    if (v <= 0.5) lower_cuts.push_back(std::asin(std::sqrt(v)));
    if (v >= 0.5) upper_cuts.push_back(std::asin(std::sqrt(1.0 - v)));
  }
  double boundary = 0.0;
  double scale = 1.0;
  if (eps > 0.0) {
    const double h = std::sqrt(eps * (1.0 - eps));
    const double q_hi = m.quantile_upper(eps);
    const double q_lo = m.quantile(eps);
    boundary = h * (q_hi - q_lo);
    scale += h * (std::abs(q_hi) + std::abs(q_lo));
  }
  const quadrature::Options opts{.abs_tol = 1e-10 * scale};
  // Lower half: v = sin^2(theta). Upper half: 1 - v = sin^2(phi), cos(2 theta) = -cos(2 phi).
  auto lower = [&m](double theta) {
    const double s = std::sin(theta);
    return m.quantile(s * s) * std::cos(2.0 * theta);
  };
  auto upper = [&m](double phi) {
    const double s = std::sin(phi);
    return -m.quantile_upper(s * s) * std::cos(2.0 * phi);
  };
  const double quarter = 0.25 * std::numbers::pi;
  const double low_part = quadrature::integrate(lower, theta_lo, quarter, lower_cuts, opts).value;
  const double high_part = quadrature::integrate(upper, theta_lo, quarter, upper_cuts, opts).value;
  return boundary - low_part - high_part;
}

}  // namespace

double w1_upper_bound_sqrt(const Measure1D& m) {
  if (!m.first_moment_finite) return kInfiniteDistance;
  const bool compact = m.support_hint && std::isfinite(m.support_hint->lo) &&
                       std::isfinite(m.support_hint->hi);
  if (compact) return truncated_sqrt_integral(m, 0.0);

  const double i8 = truncated_sqrt_integral(m, 1e-8);
  const double i10 = truncated_sqrt_integral(m, 1e-10);
  const double i12 = truncated_sqrt_integral(m, 1e-12);
  const double d1 = i10 - i8;
  const double d2 = i12 - i10;
  if (d1 <= 0.0 || d2 <= 0.0) return i12;
  const double ratio = d2 / d1;
  if (ratio >= 0.95) return kInfiniteDistance;
  return i12 + d2 * ratio / (1.0 - ratio);
}

double tail_rate_fit(const Measure1D& m, std::span<const std::size_t> n_values) {
  if (n_values.size() < 4) throw ValidationError("tail_rate_fit needs at least 4 values of n");
  const auto [lo, hi] = std::minmax_element(n_values.begin(), n_values.end());
  if (*lo == 0 || static_cast<double>(*hi) < 100.0 * static_cast<double>(*lo)) {
    throw ValidationError("tail_rate_fit needs n values spanning at least two decades");
  }
  std::vector<double> log_n;
  std::vector<double> log_w;
  for (std::size_t n : n_values) {
    const double d = w1(m, optimal_quantize(m, n));
    if (is_infinite_distance(d)) {
      throw ValidationError("tail_rate_fit: W1 of '" + m.label + "' is infinite");
    }
    log_n.push_back(std::log(static_cast<double>(n)));
    log_w.push_back(std::log(d));
  }
  return least_squares_slope(log_n, log_w);
}

}  // namespace stickywave
