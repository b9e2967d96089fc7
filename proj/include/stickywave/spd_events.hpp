#pragma once

// Event-driven sticky particle simulation: clusters move freely until two
// neighbours meet, then merge with mass and momentum conserved. Independent of
// the hull construction in spd.hpp and used to cross-check it, and as the
// per-type engine of the exact multitype simulation.

#include <cstddef>
#include <span>
#include <vector>

#include "stickywave/spd.hpp"

namespace stickywave {

struct MergeEvent {
  double time = 0.0;
  /// Particle range [first, last) of the cluster formed by the merge.
  std::size_t first = 0;
  std::size_t last = 0;
};

/// Piecewise-linear sticky trajectories on [0, horizon] from sorted positions
/// x and initial velocities lambda. Coincident particles approaching each
/// other merge at time 0.
class SpdTimeline {
 public:
  SpdTimeline(std::span<const double> x, std::span<const double> lambda, double horizon);

  double horizon() const { return horizon_; }
  std::size_t size() const { return n_; }

  /// Start times of the linear pieces: 0 followed by every merge time.
  std::vector<double> breakpoints() const;
  const std::vector<MergeEvent>& merges() const { return merges_; }

  /// Positions at time t in [0, horizon].
  std::vector<double> positions_at(double t) const;
  /// Per-particle velocity on the linear piece that starts at time t.
  std::vector<double> velocities_from(double t) const;
  /// Clusters in force right after time t.
  std::vector<Cluster> clusters_from(double t) const;

 private:
  struct Snapshot {
    double time;
    std::vector<Cluster> clusters;
  };
  const Snapshot& snapshot_for(double t) const;

  std::size_t n_ = 0;
  double horizon_ = 0.0;
  std::vector<Snapshot> snapshots_;
  std::vector<MergeEvent> merges_;
};

/// Positions at time t from the event-driven simulation.
std::vector<double> event_spd_positions(std::span<const double> x, std::span<const double> lambda,
                                        double t);

}  // namespace stickywave
