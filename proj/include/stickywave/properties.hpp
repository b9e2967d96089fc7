#pragma once

// Randomised property suites for the particle dynamics. Each suite draws its
// instances from a generator seeded by (seed, suite name), so results are
// reproducible and suites are independent of each other.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "stickywave/flux_models.hpp"

namespace stickywave {

struct PropertyResult {
  std::string name;
  std::size_t instances = 0;
  std::size_t failures = 0;
  /// Smallest (bound - measured) seen; negative beyond the slack means failure.
  double worst_margin = 0.0;
  std::string first_failure;
  bool passed() const { return failures == 0; }
};

namespace properties {

inline constexpr double kSlack = 1e-9;

// Scalar SPD.
PropertyResult stability(std::uint64_t seed, std::size_t instances);
PropertyResult contraction(std::uint64_t seed, std::size_t instances);
PropertyResult two_flux(std::uint64_t seed, std::size_t instances);
PropertyResult momentum(std::uint64_t seed, std::size_t instances);
PropertyResult finite_speed(std::uint64_t seed, std::size_t instances);
PropertyResult sortedness(std::uint64_t seed, std::size_t instances);
PropertyResult hull_vs_events(std::uint64_t seed, std::size_t instances);
PropertyResult flow(std::uint64_t seed, std::size_t instances);

// Multitype.
PropertyResult ranks_vs_bruteforce(std::uint64_t seed, std::size_t instances);
PropertyResult ush_gap_decrease(std::uint64_t seed, std::size_t instances);
PropertyResult no_recollision(std::uint64_t seed, std::size_t instances);
PropertyResult one_step_bound(std::uint64_t seed, std::size_t instances);
PropertyResult duplication(std::uint64_t seed, std::size_t instances);
PropertyResult psystem_gap_growth(std::uint64_t seed, std::size_t instances);

/// Every suite above, in declaration order.
std::vector<PropertyResult> run_all(std::uint64_t seed, std::size_t instances);

/// Random two-type field with affine speeds, declared constants exact.
FieldModel random_affine_field(std::uint64_t seed);

}  // namespace properties

}  // namespace stickywave
