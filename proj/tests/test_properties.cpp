#include <set>
#include <string>

#include <gtest/gtest.h>

#include "stickywave/properties.hpp"

using namespace stickywave;

// Smaller instance counts than the acceptance run, several seeds.
TEST(PropertySuites, AllHoldOnSeveralSeeds) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    for (const PropertyResult& r : properties::run_all(seed, 200)) {
      EXPECT_TRUE(r.passed()) << r.name << " seed=" << seed << ": " << r.first_failure;
      EXPECT_EQ(r.instances, 200u) << r.name;
      EXPECT_GE(r.worst_margin, 0.0) << r.name;
    }
  }
}

TEST(PropertySuites, DeterministicPerSeed) {
  const auto a = properties::hull_vs_events(42, 50);
  const auto b = properties::hull_vs_events(42, 50);
  EXPECT_EQ(a.worst_margin, b.worst_margin);
  const auto c = properties::ush_gap_decrease(42, 50);
  const auto d = properties::ush_gap_decrease(43, 50);
  EXPECT_NE(c.worst_margin, d.worst_margin);
}

TEST(PropertySuites, NamesAreDistinct) {
  std::set<std::string> names;
  for (const auto& r : properties::run_all(7, 1)) names.insert(r.name);
  EXPECT_EQ(names.size(), 14u);
}
