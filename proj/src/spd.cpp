#include "stickywave/spd.hpp"

#include <algorithm>
#include <cmath>

#include "stickywave/errors.hpp"
#include "stickywave/numerics.hpp"

namespace stickywave {

ParticleConfig::ParticleConfig(std::vector<double> positions) : x_(std::move(positions)) {
  for (std::size_t k = 0; k < x_.size(); ++k) {
    if (!std::isfinite(x_[k])) throw ValidationError("particle positions must be finite");
    if (k > 0 && x_[k] < x_[k - 1]) {
      throw ValidationError("particle positions must be sorted nondecreasing (index " +
                            std::to_string(k) + ")");
    }
  }
}

VelocityVector init_velocities(const FluxModel& flux, std::size_t n) {
  if (n == 0) throw ValidationError("init_velocities needs n >= 1");
  VelocityVector lambda(n);
  for (std::size_t k = 0; k < n; ++k) lambda[k] = flux.cell_average(k + 1, n);
  return lambda;
}

std::vector<double> free_transport(std::span<const double> x, std::span<const double> lambda,
                                   double t) {
  if (x.size() != lambda.size()) throw ValidationError("velocity vector length differs from n");
  std::vector<double> psi(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) psi[k] = x[k] + t * lambda[k];
  return psi;
}

namespace {

// One block of pooled increments: the hull is linear over it.
struct Block {
  CompensatedSum sum;
  std::size_t count = 0;
  std::size_t end = 0;  // one past the last increment
};

// Pool-adjacent-violators over the increments: equivalent to the monotone-chain
// lower hull of their partial sums. A new block is pooled with its left
// neighbour while its mean does not exceed the neighbour's mean (ties pool, so
// touching particles stick). Means are compared by cross-multiplication.
template <class Increment>
std::vector<Block> pool_increments(std::size_t n, Increment increment, HullStats* stats) {
  std::vector<Block> stack;
  stack.reserve(64);
  std::size_t comparisons = 0;
  for (std::size_t k = 0; k < n; ++k) {
    Block b;
    b.sum.add(increment(k));
    b.count = 1;
    b.end = k + 1;
    while (!stack.empty()) {
      ++comparisons;
      const Block& top = stack.back();
      const double lhs = b.sum.value() * static_cast<double>(top.count);
      const double rhs = top.sum.value() * static_cast<double>(b.count);
      if (lhs > rhs) break;
      b.sum.add(top.sum);
      b.count += top.count;
      stack.pop_back();
    }
    stack.push_back(b);
  }
  if (stats) stats->comparisons += comparisons;
  return stack;
}

std::vector<double> block_means(const std::vector<Block>& blocks, std::size_t n) {
  std::vector<double> out(n);
  std::size_t k = 0;
  for (const Block& b : blocks) {
    const double mean = b.sum.value() / static_cast<double>(b.count);
    for (; k < b.end; ++k) out[k] = mean;
  }
  for (std::size_t i = 1; i < n; ++i) out[i] = std::max(out[i], out[i - 1]);
  return out;
}

}  // namespace

std::vector<double> convex_minorant(std::span<const double> q, HullStats* stats) {
  if (q.empty()) throw ValidationError("convex_minorant needs at least one value");
  if (q[0] != 0.0) throw ValidationError("convex_minorant needs q[0] = 0");
  const std::size_t n = q.size() - 1;
  const auto blocks = pool_increments(n, [&q](std::size_t k) { return q[k + 1] - q[k]; }, stats);
  // Hull vertices sit on q; interpolate linearly between them.
  std::vector<double> p(q.size());
  p[0] = q[0];
  std::size_t begin = 0;
  for (const Block& b : blocks) {
    const double span_len = static_cast<double>(b.end - begin);
    for (std::size_t k = begin + 1; k < b.end; ++k) {
      const double frac = static_cast<double>(k - begin) / span_len;
      p[k] = q[begin] + frac * (q[b.end] - q[begin]);
    }
    p[b.end] = q[b.end];
    begin = b.end;
  }
  return p;
}

std::vector<double> sticky_positions_from_transport(std::span<const double> psi, HullStats* stats) {
  const auto blocks = pool_increments(psi.size(), [&psi](std::size_t k) { return psi[k]; }, stats);
  return block_means(blocks, psi.size());
}

ParticleConfig spd_positions(const ParticleConfig& x, std::span<const double> lambda, double t,
                             HullStats* stats) {
  if (x.size() != lambda.size()) throw ValidationError("velocity vector length differs from n");
  if (!(t >= 0.0)) throw ValidationError("spd_positions needs t >= 0");
  if (t == 0.0) return x;
  const auto xs = x.positions();
  const auto blocks = pool_increments(
      xs.size(), [&](std::size_t k) { return xs[k] + t * lambda[k]; }, stats);
  return ParticleConfig(block_means(blocks, xs.size()));
}

std::vector<Cluster> group_clusters(std::span<const double> positions,
                                    std::span<const double> lambda) {
  if (positions.size() != lambda.size()) throw ValidationError("velocity vector length differs from n");
  std::vector<Cluster> out;
  std::size_t first = 0;
  const std::size_t n = positions.size();
  for (std::size_t k = 1; k <= n; ++k) {
    const bool split = k == n || positions[k] - positions[k - 1] >
                                     1e-12 * (1.0 + std::abs(positions[k]));
    if (!split) continue;
    CompensatedSum v;
    CompensatedSum x;
    for (std::size_t i = first; i < k; ++i) {
      v.add(lambda[i]);
      x.add(positions[i]);
    }
    const double mass = static_cast<double>(k - first);
    out.push_back({first, k, x.value() / mass, v.value() / mass});
    first = k;
  }
  return out;
}

std::vector<Cluster> cluster_partition(const ParticleConfig& x, std::span<const double> lambda,
                                       double t) {
  const ParticleConfig y = spd_positions(x, lambda, t);
  return group_clusters(y.positions(), lambda);
}

double EmpiricalCDF::operator()(double x) const {
  const auto atoms = atoms_.atoms();
  const auto it = std::upper_bound(atoms.begin(), atoms.end(), x);
  return static_cast<double>(it - atoms.begin()) / static_cast<double>(atoms.size());
}

EmpiricalCDF empirical_cdf(const ParticleConfig& x) { return EmpiricalCDF(x); }

double l1_norm_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw ValidationError("l1_norm_diff needs equal nonzero sizes");
  CompensatedSum s;
  for (std::size_t k = 0; k < a.size(); ++k) s.add(std::abs(a[k] - b[k]));
  return s.value() / static_cast<double>(a.size());
}

double l1_distance(const EmpiricalCDF& a, const EmpiricalCDF& b) {
  if (a.size() == b.size()) return l1_norm_diff(a.measure().atoms(), b.measure().atoms());
  return w1(a.measure(), b.measure());
}

double l1_distance(const EmpiricalCDF& a, const Measure1D& reference) {
  return w1(reference, a.measure());
}

std::pair<ParticleConfig, ParticleConfig> flow_check(const ParticleConfig& x,
                                                     std::span<const double> lambda, double s,
                                                     double t) {
  if (!(s >= 0.0 && s <= t)) throw ValidationError("flow_check needs 0 <= s <= t");
  ParticleConfig direct = spd_positions(x, lambda, t);
  ParticleConfig middle = spd_positions(x, lambda, s);
  VelocityVector restart(lambda.begin(), lambda.end());
  if (s > 0.0) {
    for (const Cluster& c : group_clusters(middle.positions(), lambda)) {
      std::fill(restart.begin() + static_cast<std::ptrdiff_t>(c.first),
                restart.begin() + static_cast<std::ptrdiff_t>(c.last), c.velocity);
    }
  }
  ParticleConfig restarted = spd_positions(middle, restart, t - s);
  return {std::move(direct), std::move(restarted)};
}

}  // namespace stickywave
