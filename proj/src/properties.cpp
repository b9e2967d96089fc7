#include "stickywave/properties.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "stickywave/mspd.hpp"
#include "stickywave/quadrature.hpp"
#include "stickywave/spd.hpp"
#include "stickywave/spd_events.hpp"

namespace stickywave::properties {

namespace {

using Rng = std::mt19937_64;

Rng make_rng(std::uint64_t seed, std::string_view suite) {
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : suite) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
  return Rng(seq);
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}
std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}
bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

class Tally {
 public:
  explicit Tally(std::string name) {
    r_.name = std::move(name);
    r_.worst_margin = std::numeric_limits<double>::infinity();
  }
  void instance() { ++r_.instances; }
  // `margin` already includes the allowed slack; negative means violated.
  void check(double margin, const std::function<std::string()>& describe) {
    r_.worst_margin = std::min(r_.worst_margin, margin);
    if (margin < 0.0 || std::isnan(margin)) {
      ++r_.failures;
      if (r_.first_failure.empty()) r_.first_failure = describe();
    }
  }
  PropertyResult result() const { return r_; }

 private:
  PropertyResult r_;
};

std::string show(std::span<const double> v) {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ']';
  return os.str();
}

// Half of the instances live on an integer grid so that coincident particles
// and simultaneous collisions actually occur.
struct ScalarCase {
  std::vector<double> x;
  std::vector<double> lambda;
  double t = 0.0;
  bool grid = false;
};

std::vector<double> random_positions(Rng& rng, std::size_t n, bool grid) {
  std::vector<double> x(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0 && coin(rng, 0.15)) {
      x[k] = x[k - 1];
    } else {
      x[k] = grid ? static_cast<double>(pick(rng, 0, 6)) - 3.0 : uniform(rng, -2.0, 2.0);
    }
  }
  std::sort(x.begin(), x.end());
  return x;
}

std::vector<double> random_velocities(Rng& rng, std::size_t n, bool grid) {
  std::vector<double> v(n);
  for (double& e : v) e = grid ? static_cast<double>(pick(rng, 0, 4)) - 2.0 : uniform(rng, -1.0, 1.0);
  return v;
}

ScalarCase random_scalar_case(Rng& rng, std::size_t max_n) {
  ScalarCase c;
  c.grid = coin(rng, 0.5);
  const std::size_t n = pick(rng, 1, max_n);
  c.x = random_positions(rng, n, c.grid);
  c.lambda = random_velocities(rng, n, c.grid);
  c.t = c.grid ? 0.5 * static_cast<double>(pick(rng, 0, 8)) : uniform(rng, 0.0, 3.0);
  return c;
}

FluxModel random_flux(Rng& rng) {
  const double a = uniform(rng, -1.0, 1.0);
  const double b = uniform(rng, -1.0, 1.0);
  const double c = uniform(rng, -0.5, 0.5);
  const double freq = 2.0 * std::numbers::pi * static_cast<double>(pick(rng, 1, 3));
  FluxModel f;
  f.name = "random";
  f.lambda = [a, b, c, freq](double u) { return a + b * u + c * std::sin(freq * u); };
  f.lipschitz_const = std::abs(b) + std::abs(c) * freq;
  f.speed_bound = std::abs(a) + std::abs(b) + std::abs(c);
  return f;
}

FieldModel random_field(Rng& rng) {
  if (coin(rng, 0.5)) {
    return PSystemModel(uniform(rng, 0.3, 2.0), uniform(rng, 0.5, 10.0)).fields();
  }
  return random_affine_field(rng());
}

MultiConfig random_multi(Rng& rng, std::size_t d, std::size_t max_n) {
  const std::size_t n = pick(rng, 1, max_n);
  const bool grid = coin(rng, 0.3);
  std::vector<std::vector<double>> x(d);
  for (auto& v : x) v = random_positions(rng, n, grid);
  return MultiConfig(std::move(x));
}

}  // namespace

FieldModel random_affine_field(std::uint64_t seed) {
  Rng rng(seed);
  // lambda^1 = c1 + a1 u2 + b1 u1, lambda^2 = -c2 + a2 u1 + b2 u2 (u1 own for type 1).
  const double c1 = uniform(rng, 1.5, 3.0);
  const double c2 = uniform(rng, 1.5, 3.0);
  const double a1 = uniform(rng, -0.5, 0.5);
  const double b1 = uniform(rng, -0.5, 0.5);
  const double a2 = uniform(rng, -0.5, 0.5);
  const double b2 = uniform(rng, -0.5, 0.5);
  std::vector<FieldFunction> lambda{
      [=](std::span<const double> u) { return c1 + a1 * u[1] + b1 * u[0]; },
      [=](std::span<const double> u) { return -c2 + a2 * u[0] + b2 * u[1]; }};
  const double inf1 = c1 + std::min(0.0, a1) + std::min(0.0, b1);
  const double sup2 = -c2 + std::max(0.0, a2) + std::max(0.0, b2);
  const double lipschitz = std::max({std::abs(a1), std::abs(b1), std::abs(a2), std::abs(b2)});
  const double bound = std::max(c1 + std::abs(a1) + std::abs(b1), c2 + std::abs(a2) + std::abs(b2));
  return make_field_model("affine", std::move(lambda), lipschitz, bound, inf1 - sup2);
}

PropertyResult stability(std::uint64_t seed, std::size_t instances) {
  Rng rng = make_rng(seed, "stability");
  Tally tally("spd_stability");
  for (std::size_t it = 0; it < instances; ++it) {
    tally.instance();
    const ScalarCase a = random_scalar_case(rng, 12);
    const std::size_t n = a.x.size();
    const ParticleConfig x(a.x);
    const ParticleConfig y(random_positions(rng, n, a.grid));
    const auto mu = random_velocities(rng, n, a.grid);
    const double t = a.t;
    const double s = coin(rng, 0.2) ? 0.0 : uniform(rng, 0.0, t);
    const double at_t = l1_norm_diff(spd_positions(x, a.lambda, t).positions(),
                                     spd_positions(y, mu, t).positions());
    const double at_s = l1_norm_diff(spd_positions(x, a.lambda, s).positions(),
                                     spd_positions(y, mu, s).positions());
    const double drift = (t - s) * l1_norm_diff(a.lambda, mu);
    tally.check(at_s + drift + kSlack - at_t, [&] {
      return "x=" + show(a.x) + " lambda=" + show(a.lambda) + " t=" + std::to_string(t);
    });
  }
  return tally.result();
}

PropertyResult contraction(std::uint64_t seed, std::size_t instances) {
  Rng rng = make_rng(seed, "contraction");
  Tally tally("spd_l1_contraction");
  for (std::size_t it = 0; it < instances; ++it) {
    tally.instance();
    const ScalarCase a = random_scalar_case(rng, 12);
    const ParticleConfig x(a.x);
    const ParticleConfig y(random_positions(rng, a.x.size(), a.grid));
    const double before = l1_norm_diff(x.positions(), y.positions());
    const double after = l1_norm_diff(spd_positions(x, a.lambda, a.t).positions(),
                                      spd_positions(y, a.lambda, a.t).positions());
    tally.check(before + kSlack - after, [&] { return "x=" + show(a.x) + " y=" + show(y.vector()); });
  }
  return tally.result();
}

PropertyResult two_flux(std::uint64_t seed, std::size_t instances) {
  Rng rng = make_rng(seed, "two_flux");
  Tally tally("spd_two_flux_stability");
  for (std::size_t it = 0; it < instances; ++it) {
    tally.instance();
    const std::size_t n = pick(rng, 1, 16);
    const ParticleConfig x(random_positions(rng, n, coin(rng, 0.3)));
    const FluxModel f = random_flux(rng);
    const FluxModel g = random_flux(rng);
    const double t = uniform(rng, 0.0, 3.0);
    const auto lf = init_velocities(f, n);
    const auto lg = init_velocities(g, n);
    const double gap = l1_norm_diff(spd_positions(x, lf, t).positions(),
                                    spd_positions(x, lg, t).positions());
    const double discrete = t * l1_norm_diff(lf, lg);
    auto diff = [&](double u) { return std::abs(f.lambda(u) - g.lambda(u)); };
    // Oscillatory integrand: seed the adaptive rule with a fine uniform partition
    // so its error estimate cannot be fooled by cancellation on one panel.
    std::vector<double> cuts;
    for (int j = 1; j < 64; ++j) cuts.push_back(j / 64.0);
    const double continuum =
        t * quadrature::integrate(diff, 0.0, 1.0, cuts, {.abs_tol = 1e-13}).value;
    tally.check(discrete + kSlack - gap, [&] { return "discrete bound, x=" + show(x.vector()); });
    tally.check(continuum + kSlack - discrete, [&] { return "continuum bound, n=" + std::to_string(n); });
  }
  return tally.result();
}

PropertyResult momentum(std::uint64_t seed, std::size_t instances) {
  Rng rng = make_rng(seed, "momentum");
  Tally tally("spd_momentum_conservation");
  for (std::size_t it = 0; it < instances; ++it) {
    tally.instance();
    const ScalarCase a = random_scalar_case(rng, 64);
    const auto y = spd_positions(ParticleConfig(a.x), a.lambda, a.t);
    double lhs = 0.0;
    double rhs = 0.0;
    double scale = 0.0;
    for (std::size_t k = 0; k < a.x.size(); ++k) {
      lhs += y[k];
      rhs += a.x[k] + a.t * a.lambda[k];
      scale += std::abs(a.x[k]) + a.t * std::abs(a.lambda[k]);
    }
    tally.check(kSlack * std::max(1.0, scale) - std::abs(lhs - rhs),
                [&] { return "x=" + show(a.x) + " lambda=" + show(a.lambda); });
  }
  return tally.result();
}

PropertyResult finite_speed(std::uint64_t seed, std::size_t instances) {
  Rng rng = make_rng(seed, "finite_speed");
  Tally tally("spd_finite_speed");
  for (std::size_t it = 0; it < instances; ++it) {
    tally.instance();
    const ScalarCase a = random_scalar_case(rng, 32);
    double bound = 0.0;
    for (double v : a.lambda) bound = std::max(bound, std::abs(v));
    const auto y = spd_positions(ParticleConfig(a.x), a.lambda, a.t);
    double worst = 0.0;
    for (std::size_t k = 0; k < a.x.size(); ++k) worst = std::max(worst, std::abs(y[k] - a.x[k]));
    tally.check(a.t * bound + kSlack - worst, [&] { return "x=" + show(a.x); });
  }
  return tally.result();
}

PropertyResult sortedness(std::uint64_t seed, std::size_t instances) {
  Rng rng = make_rng(seed, "sortedness");
  Tally tally("spd_sortedness");
  for (std::size_t it = 0; it < instances; ++it) {
    tally.instance();
    const ScalarCase a = random_scalar_case(rng, 64);
    const auto y = spd_positions(ParticleConfig(a.x), a.lambda, a.t);
    double worst = 0.0;
    for (std::size_t k = 1; k < y.size(); ++k) worst = std::min(worst, y[k] - y[k - 1]);
    tally.check(worst, [&] { return "x=" + show(a.x); });
  }
  return tally.result();
}

PropertyResult hull_vs_events(std::uint64_t seed, std::size_t instances) {
  Rng rng = make_rng(seed, "hull_vs_events");
  Tally tally("spd_hull_vs_event_oracle");
  for (std::size_t it = 0; it < instances; ++it) {
    tally.instance();
    const ScalarCase a = random_scalar_case(rng, 8);
    const auto hull = spd_positions(ParticleConfig(a.x), a.lambda, a.t);
    const auto events = event_spd_positions(a.x, a.lambda, a.t);
    double worst = 0.0;
    for (std::size_t k = 0; k < a.x.size(); ++k) worst = std::max(worst, std::abs(hull[k] - events[k]));
    tally.check(kSlack - worst, [&] {
      return "x=" + show(a.x) + " lambda=" + show(a.lambda) + " t=" + std::to_string(a.t);
    });
  }
  return tally.result();
}

PropertyResult flow(std::uint64_t seed, std::size_t instances) {
  Rng rng = make_rng(seed, "flow");
  Tally tally("spd_flow_property");
  for (std::size_t it = 0; it < instances; ++it) {
    tally.instance();
    const ScalarCase a = random_scalar_case(rng, 12);
    const double s = a.grid ? 0.5 * static_cast<double>(pick(rng, 0, 4)) : uniform(rng, 0.0, a.t);
    const double t = std::max(s, a.t);
    const auto [direct, restarted] = flow_check(ParticleConfig(a.x), a.lambda, s, t);
    double worst = 0.0;
    for (std::size_t k = 0; k < a.x.size(); ++k) {
      worst = std::max(worst, std::abs(direct[k] - restarted[k]));
    }
    tally.check(kSlack - worst, [&] { return "x=" + show(a.x) + " lambda=" + show(a.lambda); });
  }
  return tally.result();
}

PropertyResult ranks_vs_bruteforce(std::uint64_t seed, std::size_t instances) {
  Rng rng = make_rng(seed, "ranks");
  Tally tally("mspd_ranks_vs_bruteforce");
  for (std::size_t it = 0; it < instances; ++it) {
    tally.instance();
    const std::size_t d = pick(rng, 2, 4);
    const MultiConfig x = random_multi(rng, d, 9);
    const RankTable table(x);
    std::size_t wrong = 0;
    for (std::size_t g = 0; g < d; ++g) {
      for (std::size_t k = 0; k < x.per_type(); ++k) {
        for (std::size_t o = 0; o < d; ++o) {
          if (o == g) continue;
          std::size_t count = 0;
          for (double p : x.type(o)) count += o < g ? (p < x.at(g, k)) : (p <= x.at(g, k));
          wrong += count != table.count(g, k, o);
        }
      }
    }
    tally.check(wrong == 0 ? 0.0 : -static_cast<double>(wrong), [&] { return "rank mismatch, d=" + std::to_string(d); });
  }
  return tally.result();
}

PropertyResult ush_gap_decrease(std::uint64_t seed, std::size_t instances) {
  Rng rng = make_rng(seed, "ush_gap");
  Tally tally("mspd_ush_gap_decrease");
  for (std::size_t it = 0; it < instances; ++it) {
    tally.instance();
    const FieldModel f = random_field(rng);
    const MultiConfig y = random_multi(rng, 2, 10);
    const double delta = uniform(rng, 0.0, 1.0);
    const MultiConfig z = tspd_step(y, f, delta);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < y.per_type(); ++i) {
      for (std::size_t j = 0; j < y.per_type(); ++j) {
        const double before = y.at(1, j) - y.at(0, i);
        const double after = z.at(1, j) - z.at(0, i);
        worst = std::min(worst, before - f.ush_gap * delta + kSlack - after);
      }
    }
    tally.check(worst, [&] { return "field " + f.name + " delta=" + std::to_string(delta); });
  }
  return tally.result();
}

PropertyResult no_recollision(std::uint64_t seed, std::size_t instances) {
  Rng rng = make_rng(seed, "no_recollision");
  Tally tally("mspd_no_recollision");
  for (std::size_t it = 0; it < instances; ++it) {
    tally.instance();
    const FieldModel f = random_field(rng);
    const MultiConfig y = random_multi(rng, 2, 10);
    const MultiConfig z = tspd_step(y, f, uniform(rng, 0.0, 1.0));
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < y.per_type(); ++i) {
      for (std::size_t j = 0; j < y.per_type(); ++j) {
        if (y.at(0, i) < y.at(1, j)) continue;
        worst = std::min(worst, z.at(0, i) - z.at(1, j) + kSlack);
      }
    }
    tally.check(worst, [&] { return "field " + f.name; });
  }
  return tally.result();
}

PropertyResult one_step_bound(std::uint64_t seed, std::size_t instances) {
  Rng rng = make_rng(seed, "one_step");
  Tally tally("mspd_one_step_bound");
  for (std::size_t it = 0; it < instances; ++it) {
    tally.instance();
    const FieldModel f = random_field(rng);
    const MultiConfig y = random_multi(rng, 2, 8);
    const double delta = uniform(rng, 0.0, 0.6);
    const double n = static_cast<double>(y.per_type());
    const MultiConfig exact = mspd_exact(y, f, delta).state;
    const MultiConfig scheme = tspd_step(y, f, delta);
    const std::size_t crossings = collision_count(y, f, delta);
    const double bound = 2.0 * delta * f.lipschitz_const / (n * n) * static_cast<double>(crossings);
    tally.check(bound + kSlack - multi_l1(exact, scheme), [&] {
      return "field " + f.name + " delta=" + std::to_string(delta) + " x1=" + show(y.type(0)) +
             " x2=" + show(y.type(1));
    });
  }
  return tally.result();
}

PropertyResult duplication(std::uint64_t seed, std::size_t instances) {
  Rng rng = make_rng(seed, "duplication");
  Tally tally("mspd_duplication_norm");
  for (std::size_t it = 0; it < instances; ++it) {
    tally.instance();
    const std::size_t d = pick(rng, 1, 3);
    const MultiConfig x = random_multi(rng, d, 10);
    std::vector<std::vector<double>> yv(d);
    for (auto& v : yv) v = random_positions(rng, x.per_type(), false);
    const MultiConfig y(std::move(yv));
    const double base = multi_l1(x, y);
    const double dup = multi_l1(duplicate(x), duplicate(y));
    tally.check(1e-14 * (1.0 + base) - std::abs(base - dup), [&] { return "d=" + std::to_string(d); });
  }
  return tally.result();
}

PropertyResult psystem_gap_growth(std::uint64_t seed, std::size_t instances) {
  Rng rng = make_rng(seed, "psystem_gap");
  Tally tally("psystem_invariant_order");
  for (std::size_t it = 0; it < instances; ++it) {
    tally.instance();
    const PSystemModel model(uniform(rng, 0.3, 2.0), uniform(rng, 0.5, 10.0));
    const FieldModel f = model.fields();
    const std::size_t n = pick(rng, 1, 8);
    // Type 2 (w+) sits at or left of type 1 (w-) index by index.
    std::vector<double> right = random_positions(rng, n, false);
    std::vector<double> left(n);
    for (std::size_t k = 0; k < n; ++k) left[k] = right[k] - (coin(rng, 0.2) ? 0.0 : uniform(rng, 0.0, 1.0));
    std::sort(left.begin(), left.end());
    for (std::size_t k = 0; k < n; ++k) left[k] = std::min(left[k], right[k]);
    const MultiConfig x({right, left});
    std::vector<double> times;
    for (int s = 0; s <= 8; ++s) times.push_back(0.125 * s);
    const auto path = mspd_trajectory(x, f, times);
    double previous_min = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < times.size(); ++s) {
      double min_gap = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < n; ++k) {
        const double gap = path[s].at(0, k) - path[s].at(1, k);
        min_gap = std::min(min_gap, gap);
        tally.check(gap - (right[k] - left[k]) - 2.0 * model.ell() * times[s] + kSlack,
                    [&] { return "pair growth, " + f.name + " k=" + std::to_string(k); });
      }
      if (previous_min >= 0.0) {
        tally.check(min_gap - previous_min + kSlack, [&] { return "min gap decreased, " + f.name; });
      }
      previous_min = min_gap;
    }
  }
  return tally.result();
}

std::vector<PropertyResult> run_all(std::uint64_t seed, std::size_t instances) {
  return {stability(seed, instances),         contraction(seed, instances),
          two_flux(seed, instances),          momentum(seed, instances),
          finite_speed(seed, instances),      sortedness(seed, instances),
          hull_vs_events(seed, instances),    flow(seed, instances),
          ranks_vs_bruteforce(seed, instances), ush_gap_decrease(seed, instances),
          no_recollision(seed, instances),    one_step_bound(seed, instances),
          duplication(seed, instances),       psystem_gap_growth(seed, instances)};
}

}  // namespace stickywave::properties
