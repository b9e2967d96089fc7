#include "stickywave/spd_events.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stickywave/errors.hpp"
#include "stickywave/numerics.hpp"

namespace stickywave {

namespace {

double touch_tol(double position) { return 1e-12 * (1.0 + std::abs(position)); }

struct Live {
  Cluster c;
  bool grew = false;
};

double mean_velocity(std::span<const double> lambda, std::size_t first, std::size_t last) {
  CompensatedSum s;
  for (std::size_t i = first; i < last; ++i) s.add(lambda[i]);
  return s.value() / static_cast<double>(last - first);
}

void merge_into_left(std::vector<Live>& live, std::size_t i, std::span<const double> lambda) {
  Live& left = live[i];
  const Live& right = live[i + 1];
  const double ml = static_cast<double>(left.c.mass());
  const double mr = static_cast<double>(right.c.mass());
  left.c.position = (ml * left.c.position + mr * right.c.position) / (ml + mr);
  left.c.last = right.c.last;
  left.c.velocity = mean_velocity(lambda, left.c.first, left.c.last);
  left.grew = true;
  live.erase(live.begin() + static_cast<std::ptrdiff_t>(i) + 1);
}

// Merges neighbours that touch and approach each other until none remain.
void merge_touching(std::vector<Live>& live, std::span<const double> lambda) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i + 1 < live.size();) {
      const Cluster& a = live[i].c;
      const Cluster& b = live[i + 1].c;
      if (b.position - a.position <= touch_tol(b.position) && a.velocity > b.velocity) {
        merge_into_left(live, i, lambda);
        changed = true;
      } else {
        ++i;
      }
    }
  }
}

}  // namespace

SpdTimeline::SpdTimeline(std::span<const double> x, std::span<const double> lambda, double horizon)
    : n_(x.size()), horizon_(horizon) {
  if (x.size() != lambda.size()) throw ValidationError("velocity vector length differs from n");
  if (!(horizon >= 0.0)) throw ValidationError("timeline horizon must be >= 0");
  for (std::size_t k = 1; k < x.size(); ++k) {
    if (x[k] < x[k - 1]) throw ValidationError("timeline positions must be sorted");
  }

  std::vector<Live> live;
  live.reserve(n_);
  for (std::size_t k = 0; k < n_; ++k) live.push_back({{k, k + 1, x[k], lambda[k]}, false});

  auto record = [&](double time) {
    Snapshot snap{time, {}};
    for (Live& l : live) {
      if (l.grew) merges_.push_back({time, l.c.first, l.c.last});
      l.grew = false;
      snap.clusters.push_back(l.c);
    }
    snapshots_.push_back(std::move(snap));
  };

  merge_touching(live, lambda);
  record(0.0);

  double now = 0.0;
  while (live.size() > 1) {
    double first_hit = std::numeric_limits<double>::infinity();
    std::vector<double> hit(live.size() - 1, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i + 1 < live.size(); ++i) {
      const double closing = live[i].c.velocity - live[i + 1].c.velocity;
      if (closing <= 0.0) continue;
      const double gap = std::max(0.0, live[i + 1].c.position - live[i].c.position);
      hit[i] = gap / closing;
      first_hit = std::min(first_hit, hit[i]);
    }
    if (!std::isfinite(first_hit) || now + first_hit > horizon_) break;

    for (Live& l : live) l.c.position += l.c.velocity * first_hit;
    now += first_hit;

    // Pairs meeting within 1e-12 of the first hit are processed jointly.
    const double window = first_hit + 1e-12 * std::max(1.0, now);
    std::vector<bool> meets(hit.size());
    for (std::size_t i = 0; i < hit.size(); ++i) meets[i] = hit[i] <= window;
    for (std::size_t i = hit.size(); i-- > 0;) {
      if (meets[i]) merge_into_left(live, i, lambda);
    }
    merge_touching(live, lambda);
    record(now);
  }
}

const SpdTimeline::Snapshot& SpdTimeline::snapshot_for(double t) const {
  auto it = std::upper_bound(snapshots_.begin(), snapshots_.end(), t,
                             [](double value, const Snapshot& s) { return value < s.time; });
  if (it == snapshots_.begin()) return snapshots_.front();
  return *(it - 1);
}

std::vector<double> SpdTimeline::breakpoints() const {
  std::vector<double> out;
  for (const Snapshot& s : snapshots_) out.push_back(s.time);
  return out;
}

std::vector<double> SpdTimeline::positions_at(double t) const {
  const Snapshot& snap = snapshot_for(t);
  const double dt = t - snap.time;
  std::vector<double> out(n_);
  for (const Cluster& c : snap.clusters) {
    const double p = c.position + c.velocity * dt;
    for (std::size_t i = c.first; i < c.last; ++i) out[i] = p;
  }
  for (std::size_t i = 1; i < n_; ++i) out[i] = std::max(out[i], out[i - 1]);
  return out;
}

std::vector<double> SpdTimeline::velocities_from(double t) const {
  const Snapshot& snap = snapshot_for(t);
  std::vector<double> out(n_);
  for (const Cluster& c : snap.clusters) {
    for (std::size_t i = c.first; i < c.last; ++i) out[i] = c.velocity;
  }
  return out;
}

std::vector<Cluster> SpdTimeline::clusters_from(double t) const {
  const Snapshot& snap = snapshot_for(t);
  std::vector<Cluster> out = snap.clusters;
  for (Cluster& c : out) c.position += c.velocity * (t - snap.time);
  return out;
}

std::vector<double> event_spd_positions(std::span<const double> x, std::span<const double> lambda,
                                        double t) {
  return SpdTimeline(x, lambda, t).positions_at(t);
}

}  // namespace stickywave
