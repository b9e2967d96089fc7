#include "stickywave/mspd.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <limits>
#include <set>
#include <tuple>

#include "stickywave/csv.hpp"
#include "stickywave/errors.hpp"
#include "stickywave/numerics.hpp"
#include "stickywave/spd_events.hpp"

namespace stickywave {

MultiConfig::MultiConfig(std::vector<std::vector<double>> positions) : x_(std::move(positions)) {
  if (x_.empty()) throw ValidationError("MultiConfig needs at least one type");
  const std::size_t n = x_.front().size();
  for (std::size_t g = 0; g < x_.size(); ++g) {
    if (x_[g].size() != n) throw ValidationError("all types must have the same particle count");
    for (std::size_t k = 0; k < n; ++k) {
      if (!std::isfinite(x_[g][k])) throw ValidationError("positions must be finite");
      if (k > 0 && x_[g][k] < x_[g][k - 1]) {
        throw ValidationError("positions of type " + std::to_string(g + 1) + " are not sorted");
      }
    }
  }
}

double multi_l1(const MultiConfig& x, const MultiConfig& y) {
  if (x.types() != y.types() || x.per_type() != y.per_type()) {
    throw ValidationError("multi_l1 needs configurations of equal shape");
  }
  CompensatedSum s;
  for (std::size_t g = 0; g < x.types(); ++g) {
    for (std::size_t k = 0; k < x.per_type(); ++k) s.add(std::abs(x.at(g, k) - y.at(g, k)));
  }
  return s.value() / static_cast<double>(x.per_type());
}

RankTable::RankTable(const MultiConfig& x, double tol)
    : d_(x.types()), n_(x.per_type()), counts_(d_ * n_ * d_, 0) {
  for (std::size_t gamma = 0; gamma < d_; ++gamma) {
    const auto own = x.type(gamma);
    for (std::size_t other = 0; other < d_; ++other) {
      if (other == gamma) continue;
      const auto foreign = x.type(other);
      // Both vectors are sorted, so one merged sweep per pair of types.
      std::size_t j = 0;
      for (std::size_t k = 0; k < n_; ++k) {
        if (other < gamma) {
          while (j < n_ && foreign[j] < own[k] - tol) ++j;
        } else {
          while (j < n_ && foreign[j] <= own[k] + tol) ++j;
        }
        counts_[(gamma * n_ + k) * d_ + other] = j;
      }
    }
  }
}

RankTable ranks(const MultiConfig& x, double tol) { return RankTable(x, tol); }

std::vector<VelocityVector> tspd_velocities(const MultiConfig& x, const FieldModel& fields,
                                            double tol) {
  if (fields.d != x.types()) {
    throw ValidationError("field model has " + std::to_string(fields.d) + " types, configuration " +
                          std::to_string(x.types()));
  }
  const RankTable table(x, tol);
  const std::size_t d = x.types();
  const std::size_t n = x.per_type();
  std::vector<VelocityVector> out(d, VelocityVector(n));
  std::vector<double> frozen(d, 0.0);
  for (std::size_t gamma = 0; gamma < d; ++gamma) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t other = 0; other < d; ++other) {
        frozen[other] = other == gamma ? 0.0 : table.rank(gamma, k, other);
      }
      out[gamma][k] = fields.cell_average(gamma, frozen, k + 1, n);
    }
  }
  return out;
}

namespace {

constexpr std::size_t kParallelThreshold = 1 << 14;

MultiConfig advance_types(const MultiConfig& x, const std::vector<VelocityVector>& velocities,
                          double delta) {
  const std::size_t d = x.types();
  std::vector<std::vector<double>> out(d);
  auto solve = [&](std::size_t g) {
    out[g] = spd_positions(ParticleConfig(x.vectors()[g]), velocities[g], delta).vector();
  };
  if (x.per_type() >= kParallelThreshold && d > 1) {
    std::vector<std::future<void>> jobs;
    for (std::size_t g = 0; g < d; ++g) jobs.push_back(std::async(std::launch::async, solve, g));
    for (auto& job : jobs) job.get();
  } else {
    for (std::size_t g = 0; g < d; ++g) solve(g);
  }
  return MultiConfig(std::move(out));
}

std::size_t full_steps(double delta, double t) {
  return static_cast<std::size_t>(std::floor(t / delta * (1.0 + 1e-12)));
}

}  // namespace

MultiConfig tspd_step(const MultiConfig& x, const FieldModel& fields, double delta) {
  if (!(delta >= 0.0)) throw ValidationError("tspd_step needs delta >= 0");
  if (delta == 0.0) return x;
  return advance_types(x, tspd_velocities(x, fields), delta);
}

MultiConfig iterated_tspd(const MultiConfig& x, const FieldModel& fields, double delta, double t) {
  const double times[] = {t};
  return iterated_tspd_trajectory(x, fields, delta, times).front();
}

std::vector<MultiConfig> iterated_tspd_trajectory(const MultiConfig& x, const FieldModel& fields,
                                                  double delta, std::span<const double> times) {
  if (!(delta > 0.0)) throw ValidationError("iterated TSPD needs delta > 0");
  std::vector<MultiConfig> out;
  MultiConfig grid = x;
  std::size_t steps_done = 0;
  auto velocities = tspd_velocities(grid, fields);
  double previous = 0.0;
  for (double s : times) {
    if (!(s >= previous)) throw ValidationError("output times must be nondecreasing and >= 0");
    previous = s;
    const std::size_t target = full_steps(delta, s);
    while (steps_done < target) {
      grid = advance_types(grid, velocities, delta);
      velocities = tspd_velocities(grid, fields);
      ++steps_done;
    }
    const double rest = std::max(0.0, s - static_cast<double>(steps_done) * delta);
    out.push_back(rest > 0.0 ? advance_types(grid, velocities, rest) : grid);
  }
  return out;
}

MultiConfig duplicate(const MultiConfig& x) {
  std::vector<std::vector<double>> out(x.types());
  for (std::size_t g = 0; g < x.types(); ++g) {
    out[g].reserve(2 * x.per_type());
    for (double v : x.type(g)) {
      out[g].push_back(v);
      out[g].push_back(v);
    }
  }
  return MultiConfig(std::move(out));
}

namespace {

double coincide_tol(const MspdOptions& opts, double position) {
  return opts.coincidence_tol * (1.0 + std::abs(position));
}

// Index of the cluster containing each particle.
std::vector<std::size_t> owner_of(const std::vector<Cluster>& clusters, std::size_t n) {
  std::vector<std::size_t> owner(n);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (std::size_t i = clusters[c].first; i < clusters[c].last; ++i) owner[i] = c;
  }
  return owner;
}

// Cluster events between two partitions of the same particles at one instant.
void diff_partitions(const std::vector<Cluster>& before, const std::vector<Cluster>& after,
                     double time, std::size_t type, std::size_t n,
                     std::vector<ClusterEvent>& events) {
  const auto owner_after = owner_of(after, n);
  for (const Cluster& c : before) {
    if (c.mass() < 2) continue;
    if (owner_after[c.first] != owner_after[c.last - 1]) {
      events.push_back({time, type, ClusterEventKind::split, c.first, c.last});
    }
  }
  const auto owner_before = owner_of(before, n);
  for (const Cluster& c : after) {
    if (c.mass() < 2) continue;
    bool unchanged = false;
    bool had_cluster = false;
    for (std::size_t i = c.first; i < c.last; ++i) {
      const Cluster& old = before[owner_before[i]];
      if (old.mass() >= 2) had_cluster = true;
      if (old.first == c.first && old.last == c.last) unchanged = true;
    }
    if (unchanged) continue;
    events.push_back({time, type, had_cluster ? ClusterEventKind::merge : ClusterEventKind::form,
                      c.first, c.last});
  }
}

std::vector<Cluster> singletons(std::span<const double> x) {
  std::vector<Cluster> out;
  for (std::size_t k = 0; k < x.size(); ++k) out.push_back({k, k + 1, x[k], 0.0});
  return out;
}

struct EarliestCrossing {
  double time = std::numeric_limits<double>::infinity();
  std::size_t alpha = 0, i = 0, beta = 0, j = 0;
};

// Earliest meeting of a faster-type particle with a slower-type particle to
// its right, scanning the linear pieces common to all type timelines.
EarliestCrossing find_crossing(const std::vector<SpdTimeline>& lines, double horizon,
                               const MspdOptions& opts) {
  std::vector<double> cuts;
  for (const auto& line : lines) {
    const auto b = line.breakpoints();
    cuts.insert(cuts.end(), b.begin(), b.end());
  }
  cuts.push_back(horizon);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const std::size_t d = lines.size();
  EarliestCrossing best;
  for (std::size_t m = 0; m + 1 < cuts.size(); ++m) {
    const double a = cuts[m];
    const double b = cuts[m + 1];
    std::vector<std::vector<double>> pos(d);
    std::vector<std::vector<double>> vel(d);
    for (std::size_t g = 0; g < d; ++g) {
      pos[g] = lines[g].positions_at(a);
      vel[g] = lines[g].velocities_from(a);
    }
    for (std::size_t alpha = 0; alpha < d; ++alpha) {
      for (std::size_t beta = alpha + 1; beta < d; ++beta) {
        for (std::size_t i = 0; i < pos[alpha].size(); ++i) {
          for (std::size_t j = 0; j < pos[beta].size(); ++j) {
            const double gap = pos[beta][j] - pos[alpha][i];
            if (gap <= coincide_tol(opts, pos[beta][j])) continue;
            const double closing = vel[alpha][i] - vel[beta][j];
            if (!(closing > 0.0)) continue;
            const double when = a + gap / closing;
            if (!std::isfinite(when)) {
              throw NumericalError("crossing time of pair (" + std::to_string(alpha + 1) + ":" +
                                   std::to_string(i + 1) + ", " + std::to_string(beta + 1) + ":" +
                                   std::to_string(j + 1) + ") is not finite");
            }
            if (when <= b && when < best.time) best = {when, alpha, i, beta, j};
          }
        }
      }
    }
    if (std::isfinite(best.time)) break;
  }
  return best;
}

std::vector<double> sorted_copy(std::vector<double> v) {
  for (std::size_t k = 1; k < v.size(); ++k) v[k] = std::max(v[k], v[k - 1]);
  return v;
}

using SampleSink = std::function<void(std::size_t, MultiConfig)>;

MspdResult run_mspd(const MultiConfig& x, const FieldModel& fields, double t_end,
                    const MspdOptions& opts, std::span<const double> sample_times,
                    const SampleSink& sink) {
  const std::size_t d = x.types();
  const std::size_t n = x.per_type();
  if (d * n > opts.max_particles) {
    throw ValidationError("exact MSPD is capped at n*d <= " + std::to_string(opts.max_particles) +
                          ", got " + std::to_string(d * n));
  }
  if (!(t_end >= 0.0)) throw ValidationError("mspd_exact needs t >= 0");
  if (fields.d != d) throw ValidationError("field model and configuration disagree on d");
  const std::size_t event_cap = n * n * d * (d - 1) / 2;

  MspdResult result;
  std::vector<std::vector<double>> state = x.vectors();
  std::vector<std::vector<Cluster>> previous(d);
  for (std::size_t g = 0; g < d; ++g) previous[g] = singletons(state[g]);
  double now = 0.0;
  std::size_t next_sample = 0;

  while (true) {
    const MultiConfig current(state);
    const double scale = 1.0 + [&] {
      double m = 0.0;
      for (const auto& v : state)
        for (double p : v) m = std::max(m, std::abs(p));
      return m;
    }();
    const auto velocities = tspd_velocities(current, fields, opts.coincidence_tol * scale);
    const double horizon = std::max(0.0, t_end - now);

    std::vector<SpdTimeline> lines;
    for (std::size_t g = 0; g < d; ++g) lines.emplace_back(state[g], velocities[g], horizon);

    for (std::size_t g = 0; g < d; ++g) {
      diff_partitions(previous[g], lines[g].clusters_from(0.0), now, g, n, result.cluster_events);
    }

    const EarliestCrossing hit = find_crossing(lines, horizon, opts);
    const double stop = std::isfinite(hit.time) ? hit.time : horizon;

    // Same-type merges inside this piece.
    for (std::size_t g = 0; g < d; ++g) {
      const auto cuts = lines[g].breakpoints();
      for (std::size_t c = 1; c < cuts.size() && cuts[c] <= stop; ++c) {
        diff_partitions(lines[g].clusters_from(cuts[c - 1]), lines[g].clusters_from(cuts[c]),
                        now + cuts[c], g, n, result.cluster_events);
      }
    }

    while (next_sample < sample_times.size() &&
           (sample_times[next_sample] < now + stop ||
            (!std::isfinite(hit.time) && sample_times[next_sample] <= t_end))) {
      std::vector<std::vector<double>> sample(d);
      const double local = std::clamp(sample_times[next_sample] - now, 0.0, horizon);
      for (std::size_t g = 0; g < d; ++g) sample[g] = sorted_copy(lines[g].positions_at(local));
      sink(next_sample, MultiConfig(std::move(sample)));
      ++next_sample;
    }

    for (std::size_t g = 0; g < d; ++g) {
      state[g] = sorted_copy(lines[g].positions_at(stop));
      previous[g] = lines[g].clusters_from(stop);
    }
    if (!std::isfinite(hit.time)) break;

    now += stop;
    result.restart_times.push_back(now);
    bool recorded_first = false;
    for (std::size_t alpha = 0; alpha < d; ++alpha) {
      for (std::size_t beta = alpha + 1; beta < d; ++beta) {
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            const bool is_hit = alpha == hit.alpha && beta == hit.beta && i == hit.i && j == hit.j;
            const double gap = state[beta][j] - state[alpha][i];
            if (!is_hit) {
              // Only pairs still in R at the start of this piece can cross now.
              if (gap > coincide_tol(opts, state[beta][j])) continue;
              const double start_gap = current.at(beta, j) - current.at(alpha, i);
              if (start_gap <= coincide_tol(opts, current.at(beta, j))) continue;
            }
            recorded_first = recorded_first || is_hit;
            result.crossings.push_back({result.crossings.size(), now, alpha, i, beta, j});
          }
        }
      }
    }
    if (!recorded_first) throw NumericalError("crossing bookkeeping lost the earliest pair");
    if (result.crossings.size() > event_cap) {
      throw NumericalError("exact MSPD exceeded the event cap of " + std::to_string(event_cap));
    }
    if (now >= t_end) break;
  }
  while (next_sample < sample_times.size()) {
    sink(next_sample, MultiConfig(state));
    ++next_sample;
  }
  result.state = MultiConfig(std::move(state));
  return result;
}

}  // namespace

MspdResult mspd_exact(const MultiConfig& x, const FieldModel& fields, double t,
                      const MspdOptions& opts) {
  return run_mspd(x, fields, t, opts, {}, [](std::size_t, MultiConfig) {});
}

std::vector<MultiConfig> mspd_trajectory(const MultiConfig& x, const FieldModel& fields,
                                         std::span<const double> times, const MspdOptions& opts) {
  if (times.empty()) return {};
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] < times[i - 1]) throw ValidationError("sample times must be nondecreasing");
  }
  std::vector<MultiConfig> out(times.size());
  run_mspd(x, fields, times.back(), opts, times,
           [&out](std::size_t i, MultiConfig c) { out[i] = std::move(c); });
  return out;
}

std::size_t collision_count(const MultiConfig& y, const FieldModel& fields, double delta,
                            const MspdOptions& opts) {
  const MspdResult r = mspd_exact(y, fields, delta, opts);
  std::set<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> pairs;
  for (const CrossingEvent& e : r.crossings) {
    if (y.at(e.beta, e.j) - y.at(e.alpha, e.i) > 0.0) pairs.insert({e.alpha, e.i, e.beta, e.j});
  }
  return pairs.size();
}

const char* to_string(ClusterEventKind kind) {
  switch (kind) {
    case ClusterEventKind::form: return "form";
    case ClusterEventKind::merge: return "merge";
    case ClusterEventKind::split: return "split";
  }
  return "unknown";
}

void write_event_csv(std::ostream& out, const std::vector<CrossingEvent>& events) {
  out << csv::kVersionLine << '\n' << "event_index,time,alpha,i,beta,j\n";
  for (const CrossingEvent& e : events) {
    out << e.index << ',' << csv::num(e.time) << ',' << e.alpha + 1 << ',' << e.i + 1 << ','
        << e.beta + 1 << ',' << e.j + 1 << '\n';
  }
}

void write_cluster_event_csv(std::ostream& out, const std::vector<ClusterEvent>& events) {
  out << csv::kVersionLine << '\n' << "time,type,kind,first,last\n";
  for (const ClusterEvent& e : events) {
    out << csv::num(e.time) << ',' << e.type + 1 << ',' << to_string(e.kind) << ',' << e.first + 1
        << ',' << e.last << '\n';
  }
}

}  // namespace stickywave
