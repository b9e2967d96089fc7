#pragma once

// Closed-form and particle-based reference solutions, and the field-sample
// CSV schema.

#include <cstddef>
#include <ostream>
#include <vector>

#include "stickywave/flux_models.hpp"
#include "stickywave/measures.hpp"
#include "stickywave/spd.hpp"

namespace stickywave {

/// Burgers with a point mass at 0: a single rarefaction fan, u(t, x) = x / t on [0, t).
/// At t = 0 this is the Heaviside step at 0.
double burgers_delta_entropy(double t, double x);

/// The same solution at time t as a probability measure (uniform on [0, t]).
Measure1D burgers_delta_measure(double t);

/// ||u - u_n||_L1 for the Burgers point-mass datum: t / (4n).
double burgers_delta_particle_error(std::size_t n, double t);

/// Burgers entropy solution at time t for a purely atomic nondecreasing datum:
/// every atom opens its own fan and the fans never meet, so the CDF is
/// piecewise linear with knots (x_i + t F_{i-1}, F_{i-1}) and (x_i + t F_i, F_i).
Measure1D burgers_atoms_measure(const std::vector<std::pair<double, double>>& atoms, double t);

/// Burgers with m = (delta_{-1} + delta_1) / 2: fans on [-1, -1 + t/2] and
/// [1 + t/2, 1 + t], plateau 1/2 in between.
double two_rarefaction_check(double t, double x);

/// SPD run on optimal_quantize(m, resolution) with the given flux; for a
/// concave flux this is the exact entropy solution of the discretised datum.
EmpiricalCDF particle_reference(const FluxModel& flux, const Measure1D& m, double t,
                                std::size_t resolution = 1 << 16);

/// concave_lwr flux with the standard Laplace datum.
EmpiricalCDF concave_reference(double t, std::size_t resolution = 1 << 16);

struct ScalarSample {
  double t = 0.0;
  double x = 0.0;
  double value = 0.0;
};

struct PSystemSample {
  double t = 0.0;
  double x = 0.0;
  double w_minus = 0.0;
  double w_plus = 0.0;
  double u = 0.0;
  double v = 0.0;
};

/// `t,x,value` rows after the version line.
void write_field_csv(std::ostream& out, const std::vector<ScalarSample>& rows);
/// `t,x,wminus,wplus,u,v` rows after the version line.
void write_field_csv(std::ostream& out, const std::vector<PSystemSample>& rows);

}  // namespace stickywave
