#pragma once

// Scalar sticky particle dynamics of n particles of mass 1/n.
//
// Positions at time t come from the Brenier-Grenier construction: the
// cumulative sums of the free-transport positions x_k + t lambda_k are
// replaced by their greatest convex minorant, whose increments are the sticky
// positions. One O(n) pass per time query.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "stickywave/flux_models.hpp"
#include "stickywave/measures.hpp"

namespace stickywave {

/// Sorted particle positions (x_1 <= ... <= x_n).
class ParticleConfig {
 public:
  ParticleConfig() = default;
  /// Throws ValidationError if the positions are not sorted or not finite.
  explicit ParticleConfig(std::vector<double> positions);

  std::size_t size() const { return x_.size(); }
  std::span<const double> positions() const { return x_; }
  const std::vector<double>& vector() const { return x_; }
  double operator[](std::size_t k) const { return x_[k]; }

 private:
  std::vector<double> x_;
};

using VelocityVector = std::vector<double>;

/// lambda_k = n * integral of the flux speed over the k-th cell.
VelocityVector init_velocities(const FluxModel& flux, std::size_t n);

/// x_k + t lambda_k; the result is unsorted once a collision has happened.
std::vector<double> free_transport(std::span<const double> x, std::span<const double> lambda, double t);

struct HullStats {
  /// Slope comparisons performed; at most 2n for n increments.
  std::size_t comparisons = 0;
};

/// Greatest convex minorant of the piecewise-linear interpolant of q on the
/// grid 0, 1/n, ..., 1, sampled at the grid. Requires q[0] = 0 and q.size() >= 1.
std::vector<double> convex_minorant(std::span<const double> q, HullStats* stats = nullptr);

/// Sticky positions phi[lambda](x; t).
ParticleConfig spd_positions(const ParticleConfig& x, std::span<const double> lambda, double t,
                             HullStats* stats = nullptr);

/// Same computation on raw free-transport positions psi (any order), as used
/// when the hull routine is exercised directly.
std::vector<double> sticky_positions_from_transport(std::span<const double> psi,
                                                    HullStats* stats = nullptr);

/// Particles [first, last) sharing one position, moving at the mean of their
/// initial velocities.
struct Cluster {
  std::size_t first = 0;
  std::size_t last = 0;
  double position = 0.0;
  double velocity = 0.0;
  std::size_t mass() const { return last - first; }
};

/// Maximal runs of positions within 1e-12 (1 + |x|) of each other.
std::vector<Cluster> group_clusters(std::span<const double> positions, std::span<const double> lambda);

/// Clusters of spd_positions(x, lambda, t).
std::vector<Cluster> cluster_partition(const ParticleConfig& x, std::span<const double> lambda, double t);

/// Right-continuous step CDF with jumps of 1/n at the particle positions.
class EmpiricalCDF {
 public:
  explicit EmpiricalCDF(const ParticleConfig& x) : atoms_(x.vector()) {}
  explicit EmpiricalCDF(DiscreteMeasure atoms) : atoms_(std::move(atoms)) {}

  std::size_t size() const { return atoms_.size(); }
  double operator()(double x) const;
  const DiscreteMeasure& measure() const { return atoms_; }

 private:
  DiscreteMeasure atoms_;
};

EmpiricalCDF empirical_cdf(const ParticleConfig& x);

/// Integral of |F_a - F_b| over the line; (1/n) sum |a_k - b_k| for equal sizes.
double l1_distance(const EmpiricalCDF& a, const EmpiricalCDF& b);
/// Integral of |F_a - F| against a reference measure.
double l1_distance(const EmpiricalCDF& a, const Measure1D& reference);

/// (1/n) sum_k |a_k - b_k|.
double l1_norm_diff(std::span<const double> a, std::span<const double> b);

/// Returns (phi(x; t), phi(y; t - s)) where y = phi(x; s) and y moves with the
/// cluster velocities at time s. At s = 0 the input velocities are kept:
/// coincident particles have not interacted yet.
std::pair<ParticleConfig, ParticleConfig> flow_check(const ParticleConfig& x,
                                                     std::span<const double> lambda, double s,
                                                     double t);

}  // namespace stickywave
