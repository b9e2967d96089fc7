#pragma once

// Multitype sticky particle dynamics: d species of n particles each, one
// species per characteristic field, type 0 fastest.

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "stickywave/flux_models.hpp"
#include "stickywave/spd.hpp"

namespace stickywave {

/// d sorted position vectors of common length n.
class MultiConfig {
 public:
  MultiConfig() = default;
  /// Throws ValidationError unless d >= 1, all lengths agree and each vector is sorted.
  explicit MultiConfig(std::vector<std::vector<double>> positions);

  std::size_t types() const { return x_.size(); }
  std::size_t per_type() const { return x_.empty() ? 0 : x_.front().size(); }
  std::span<const double> type(std::size_t gamma) const { return x_[gamma]; }
  const std::vector<std::vector<double>>& vectors() const { return x_; }
  double at(std::size_t gamma, std::size_t k) const { return x_[gamma][k]; }

 private:
  std::vector<std::vector<double>> x_;
};

/// ||x - y||_1 = (1/n) sum over all types and particles of |x - y|.
double multi_l1(const MultiConfig& x, const MultiConfig& y);

/// Counts behind the scaled ranks omega^{gamma'}_{gamma:k}: the number of
/// type-gamma' particles strictly left of x^gamma_k when gamma' < gamma, and
/// left of or at x^gamma_k when gamma' > gamma.
class RankTable {
 public:
  /// `tol` widens "at" to |difference| <= tol (0 = exact comparisons).
  explicit RankTable(const MultiConfig& x, double tol = 0.0);

  std::size_t count(std::size_t gamma, std::size_t k, std::size_t other) const {
    return counts_[(gamma * n_ + k) * d_ + other];
  }
  double rank(std::size_t gamma, std::size_t k, std::size_t other) const {
    return static_cast<double>(count(gamma, k, other)) / static_cast<double>(n_);
  }
  std::size_t types() const { return d_; }
  std::size_t per_type() const { return n_; }

 private:
  std::size_t d_ = 0;
  std::size_t n_ = 0;
  std::vector<std::size_t> counts_;
};

RankTable ranks(const MultiConfig& x, double tol = 0.0);

/// lambda~^gamma_k: cell average of field gamma over the own coordinate with
/// the foreign coordinates frozen at the ranks.
std::vector<VelocityVector> tspd_velocities(const MultiConfig& x, const FieldModel& fields,
                                            double tol = 0.0);

/// Each type evolves by scalar SPD for `delta` with the velocities of x.
MultiConfig tspd_step(const MultiConfig& x, const FieldModel& fields, double delta);

/// L = floor(t / delta) full TSPD steps, then one step of length t - L delta.
MultiConfig iterated_tspd(const MultiConfig& x, const FieldModel& fields, double delta, double t);

/// The iterated scheme sampled at the given nondecreasing times.
std::vector<MultiConfig> iterated_tspd_trajectory(const MultiConfig& x, const FieldModel& fields,
                                                  double delta, std::span<const double> times);

/// Each particle repeated twice in order.
MultiConfig duplicate(const MultiConfig& x);

struct CrossingEvent {
  std::size_t index = 0;
  double time = 0.0;
  std::size_t alpha = 0;
  std::size_t i = 0;
  std::size_t beta = 0;
  std::size_t j = 0;
};

enum class ClusterEventKind { form, merge, split };

/// Same-type cluster change: `form` when singletons first stick, `merge` when
/// an existing cluster grows, `split` when a cluster comes apart at a restart.
struct ClusterEvent {
  double time = 0.0;
  std::size_t type = 0;
  ClusterEventKind kind = ClusterEventKind::form;
  std::size_t first = 0;
  std::size_t last = 0;
};

struct MspdResult {
  MultiConfig state;
  std::vector<CrossingEvent> crossings;
  std::vector<ClusterEvent> cluster_events;
  /// Restart times (distinct cross-type collision times).
  std::vector<double> restart_times;
};

struct MspdOptions {
  /// n * d above this is rejected.
  std::size_t max_particles = 512;
  /// Positions of different types within this distance (times 1 + |x|) coincide.
  double coincidence_tol = 1e-10;
};

/// Event-driven MSPD up to time t: between cross-type collisions each type
/// follows SPD with the velocities assigned at the last restart; at every
/// collision time the ranks and velocities are recomputed.
MspdResult mspd_exact(const MultiConfig& x, const FieldModel& fields, double t,
                      const MspdOptions& opts = {});

/// MSPD states at the given nondecreasing times (one simulation, sampled).
std::vector<MultiConfig> mspd_trajectory(const MultiConfig& x, const FieldModel& fields,
                                         std::span<const double> times, const MspdOptions& opts = {});

/// N_delta(y): pairs (alpha:i, beta:j), alpha < beta, with y^alpha_i < y^beta_j
/// that cross within time delta.
std::size_t collision_count(const MultiConfig& y, const FieldModel& fields, double delta,
                            const MspdOptions& opts = {});

const char* to_string(ClusterEventKind kind);

/// `event_index,time,alpha,i,beta,j` rows (1-based type and particle indices).
void write_event_csv(std::ostream& out, const std::vector<CrossingEvent>& events);
/// `time,type,kind,first,last` rows (1-based, inclusive particle range).
void write_cluster_event_csv(std::ostream& out, const std::vector<ClusterEvent>& events);

}  // namespace stickywave
