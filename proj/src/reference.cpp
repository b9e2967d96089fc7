#include "stickywave/reference.hpp"

#include <algorithm>

#include "stickywave/csv.hpp"
#include "stickywave/errors.hpp"

namespace stickywave {

double burgers_delta_entropy(double t, double x) {
  if (t < 0.0) throw ValidationError("burgers_delta_entropy needs t >= 0");
  if (x < 0.0) return 0.0;
  if (x >= t) return 1.0;
  return x / t;
}

Measure1D burgers_delta_measure(double t) {
  if (t < 0.0) throw ValidationError("burgers_delta_measure needs t >= 0");
  return t == 0.0 ? measures::dirac(0.0) : measures::uniform(0.0, t);
}

double burgers_delta_particle_error(std::size_t n, double t) {
  if (n == 0) throw ValidationError("particle count must be >= 1");
  if (t < 0.0) throw ValidationError("time must be >= 0");
  return t / (4.0 * static_cast<double>(n));
}

Measure1D burgers_atoms_measure(const std::vector<std::pair<double, double>>& atoms, double t) {
  if (t < 0.0) throw ValidationError("burgers_atoms_measure needs t >= 0");
  if (t == 0.0) return measures::atoms(atoms);
  auto sorted = atoms;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<double, double>> knots;
  double below = 0.0;
  for (const auto& [x, w] : sorted) {
    const double above = std::min(1.0, below + w);
    knots.emplace_back(x + t * below, below);
    knots.emplace_back(x + t * above, above);
    below = above;
  }
  knots.back().second = 1.0;
  // Equal atom locations would produce repeated knots; merge them.
  std::vector<std::pair<double, double>> clean;
  for (const auto& k : knots) {
    if (!clean.empty() && !(k.first > clean.back().first)) {
      clean.back().second = std::max(clean.back().second, k.second);
    } else {
      clean.push_back(k);
    }
  }
  return measures::piecewise_linear_cdf(std::move(clean));
}

double two_rarefaction_check(double t, double x) {
  if (t < 0.0) throw ValidationError("two_rarefaction_check needs t >= 0");
  if (x < -1.0) return 0.0;
  if (t == 0.0) return x < 1.0 ? 0.5 : 1.0;
  if (x < -1.0 + 0.5 * t) return (x + 1.0) / t;
  if (x < 1.0 + 0.5 * t) return 0.5;
  if (x < 1.0 + t) return (x - 1.0) / t;
  return 1.0;
}

EmpiricalCDF particle_reference(const FluxModel& flux, const Measure1D& m, double t,
                                std::size_t resolution) {
  const ParticleConfig x(optimal_quantize(m, resolution).vector());
  const VelocityVector lambda = init_velocities(flux, resolution);
  return EmpiricalCDF(spd_positions(x, lambda, t));
}

EmpiricalCDF concave_reference(double t, std::size_t resolution) {
  return particle_reference(flux::builtin_scalar("concave_lwr"), measures::laplace(0.0, 1.0), t,
                            resolution);
}

void write_field_csv(std::ostream& out, const std::vector<ScalarSample>& rows) {
  out << csv::kVersionLine << '\n' << "t,x,value\n";
  for (const ScalarSample& r : rows) {
    out << csv::num(r.t) << ',' << csv::num(r.x) << ',' << csv::num(r.value) << '\n';
  }
}

void write_field_csv(std::ostream& out, const std::vector<PSystemSample>& rows) {
  out << csv::kVersionLine << '\n' << "t,x,wminus,wplus,u,v\n";
  for (const PSystemSample& r : rows) {
    out << csv::num(r.t) << ',' << csv::num(r.x) << ',' << csv::num(r.w_minus) << ','
        << csv::num(r.w_plus) << ',' << csv::num(r.u) << ',' << csv::num(r.v) << '\n';
  }
}

}  // namespace stickywave
