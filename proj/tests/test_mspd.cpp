#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "stickywave/errors.hpp"
#include "stickywave/measures.hpp"
#include "stickywave/mspd.hpp"
#include "stickywave/properties.hpp"

using namespace stickywave;

namespace {

// lambda^0 = 3 + 2 u1 and lambda^1 = -3 + u0: each speed depends only on the
// foreign rank, so the cell averages are read off by hand.
FieldModel rank_driven_field() {
  std::vector<FieldFunction> lambda{[](std::span<const double> u) { return 3.0 + 2.0 * u[1]; },
                                    [](std::span<const double> u) { return -3.0 + u[0]; }};
  return make_field_model("rank_driven", lambda, 2.0, 5.0, 3.0);
}

MultiConfig quantized_pair(const char* a, const char* b, std::size_t n) {
  return MultiConfig({optimal_quantize(measures::parse(a), n).vector(),
                      optimal_quantize(measures::parse(b), n).vector()});
}

}  // namespace

TEST(MultiConfigTest, Validation) {
  EXPECT_THROW(MultiConfig(std::vector<std::vector<double>>{}), ValidationError);
  EXPECT_THROW(MultiConfig({{0.0, 1.0}, {0.0}}), ValidationError);
  EXPECT_THROW(MultiConfig({{1.0, 0.0}}), ValidationError);
  const MultiConfig x({{0.0, 1.0}, {2.0, 3.0}});
  EXPECT_EQ(x.types(), 2u);
  EXPECT_EQ(x.per_type(), 2u);
  EXPECT_EQ(x.at(1, 0), 2.0);
}

TEST(MultiL1, NormalisedByParticlesPerType) {
  const MultiConfig x({{0.0, 1.0}, {2.0, 3.0}});
  const MultiConfig y({{0.5, 1.0}, {2.0, 4.0}});
  EXPECT_NEAR(multi_l1(x, y), (0.5 + 1.0) / 2.0, 1e-15);
  EXPECT_NEAR(multi_l1(duplicate(x), duplicate(y)), multi_l1(x, y), 1e-15);
  EXPECT_EQ(duplicate(x).type(0)[1], 0.0);
  EXPECT_EQ(duplicate(x).per_type(), 4u);
}

TEST(Ranks, TieConventions) {
  // A slower type counts a faster particle at the same place as already passed;
  // a faster type does not count the slower one.
  const MultiConfig x({{0.0}, {0.0}});
  const RankTable r(x);
  EXPECT_EQ(r.count(0, 0, 1), 1u);
  EXPECT_EQ(r.count(1, 0, 0), 0u);
}

TEST(Ranks, ToleranceWidensCoincidence) {
  const MultiConfig x({{0.0}, {1e-12}});
  EXPECT_EQ(RankTable(x).count(0, 0, 1), 0u);
  EXPECT_EQ(RankTable(x).count(1, 0, 0), 1u);
  EXPECT_EQ(RankTable(x, 1e-10).count(0, 0, 1), 1u);
  EXPECT_EQ(RankTable(x, 1e-10).count(1, 0, 0), 0u);
}

TEST(Tspd, VelocitiesFromRanks) {
  const MultiConfig x({{0.0, 2.0}, {1.0, 1.0}});
  const auto v = tspd_velocities(x, rank_driven_field());
  EXPECT_NEAR(v[0][0], 3.0, 1e-14);
  EXPECT_NEAR(v[0][1], 5.0, 1e-14);
  EXPECT_NEAR(v[1][0], -2.5, 1e-14);
  EXPECT_NEAR(v[1][1], -2.5, 1e-14);
}

TEST(Tspd, ConstantFieldsAreStraightLines) {
  const FieldModel f = field::constant({1.0, -1.0});
  const MultiConfig x({{-1.0, 0.0, 0.5}, {0.0, 0.2, 3.0}});
  const auto y = iterated_tspd(x, f, 0.07, 2.0);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_NEAR(y.at(0, k), x.at(0, k) + 2.0, 1e-12);
    EXPECT_NEAR(y.at(1, k), x.at(1, k) - 2.0, 1e-12);
  }
  EXPECT_THROW(iterated_tspd(x, f, 0.0, 1.0), ValidationError);
}

TEST(MspdExact, SingleCrossing) {
  const FieldModel f = field::constant({1.0, -1.0});
  const MultiConfig x({{0.0}, {1.0}});
  const MspdResult r = mspd_exact(x, f, 1.0);
  EXPECT_NEAR(r.state.at(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(r.state.at(1, 0), 0.0, 1e-14);
  ASSERT_EQ(r.crossings.size(), 1u);
  EXPECT_NEAR(r.crossings[0].time, 0.5, 1e-14);
  EXPECT_EQ(r.crossings[0].alpha, 0u);
  EXPECT_EQ(r.crossings[0].beta, 1u);
  EXPECT_TRUE(r.cluster_events.empty());
  EXPECT_EQ(collision_count(x, f, 1.0), 1u);
  EXPECT_EQ(collision_count(x, f, 0.4), 0u);
}

TEST(MspdExact, RankDrivenCrossingChangesSpeeds) {
  // Before the meeting the type-0 particle has no type-1 particle on its left
  // (speed 3) and the type-1 particle has one type-0 particle on its left
  // (speed -2): they meet at t = 1/5 at x = 3/5. The ranks then swap, giving
  // speeds 5 and -3 for the remaining 4/5.
  const MultiConfig x({{0.0}, {1.0}});
  const MspdResult r = mspd_exact(x, rank_driven_field(), 1.0);
  ASSERT_EQ(r.crossings.size(), 1u);
  EXPECT_NEAR(r.crossings[0].time, 0.2, 1e-13);
  EXPECT_NEAR(r.state.at(0, 0), 0.6 + 5.0 * 0.8, 1e-12);
  EXPECT_NEAR(r.state.at(1, 0), 0.6 - 3.0 * 0.8, 1e-12);
}

TEST(MspdExact, IteratedSchemeConvergesLinearly) {
  const FieldModel f = PSystemModel(0.5, 5.0).fields();
  const MultiConfig x = quantized_pair("laplace:-4,1", "heaviside:0", 8);
  const MultiConfig exact = mspd_exact(x, f, 3.0).state;
  double previous = INFINITY;
  for (double delta : {0.1, 0.01, 0.001}) {
    const double e = multi_l1(exact, iterated_tspd(x, f, delta, 3.0));
    EXPECT_LT(e, previous);
    previous = e;
  }
  EXPECT_LT(previous, 0.05);
}

TEST(MspdExact, TrajectoryMatchesSeparateRuns) {
  const FieldModel f = PSystemModel(0.5, 5.0).fields();
  const MultiConfig x = quantized_pair("laplace:0.1,1", "laplace:-0.1,1", 6);
  const std::vector<double> times{0.0, 0.4, 1.0, 2.5};
  const auto path = mspd_trajectory(x, f, times);
  for (std::size_t s = 0; s < times.size(); ++s) {
    EXPECT_NEAR(multi_l1(path[s], mspd_exact(x, f, times[s]).state), 0.0, 1e-10) << times[s];
  }
}

TEST(MspdExact, OrderedDatumNeverSticks) {
  const FieldModel f = PSystemModel(0.5, 5.0).fields();
  const MspdResult r = mspd_exact(quantized_pair("laplace:0.1,1", "laplace:-0.1,1", 20), f, 6.0);
  EXPECT_FALSE(r.crossings.empty());
  EXPECT_TRUE(r.cluster_events.empty());
}

TEST(MspdExact, ShockDatumClusterFormsThenBreaks) {
  const FieldModel f = PSystemModel(0.5, 5.0).fields();
  const MspdResult r = mspd_exact(quantized_pair("laplace:-4,1", "heaviside:0", 20), f, 6.0);
  const auto form = std::find_if(r.cluster_events.begin(), r.cluster_events.end(), [](const ClusterEvent& e) {
    return e.type == 1 && e.kind == ClusterEventKind::form;
  });
  ASSERT_NE(form, r.cluster_events.end());
  EXPECT_EQ(form->time, 0.0);
  EXPECT_EQ(form->last - form->first, 20u);  // all of type 2, half-open range
  const auto split = std::find_if(form, r.cluster_events.end(), [](const ClusterEvent& e) {
    return e.type == 1 && e.kind == ClusterEventKind::split;
  });
  ASSERT_NE(split, r.cluster_events.end());
  EXPECT_GT(split->time, 0.0);
  // The break-up happens at a cross-type collision.
  EXPECT_TRUE(std::any_of(r.crossings.begin(), r.crossings.end(),
                          [&](const CrossingEvent& c) { return std::abs(c.time - split->time) < 1e-12; }));
}

TEST(MspdExact, CapAndValidation) {
  const FieldModel f = field::constant({1.0, -1.0});
  const MultiConfig big({std::vector<double>(300, 0.0), std::vector<double>(300, 1.0)});
  EXPECT_THROW(mspd_exact(big, f, 1.0), ValidationError);
  EXPECT_THROW(mspd_exact(MultiConfig({{0.0}, {1.0}}), f, -1.0), ValidationError);
  EXPECT_THROW(mspd_exact(MultiConfig({{0.0}, {1.0}, {2.0}}), f, 1.0), ValidationError);
}

TEST(EventCsv, Schemas) {
  std::ostringstream ev;
  write_event_csv(ev, {{0, 0.5, 0, 2, 1, 0}});
  EXPECT_EQ(ev.str(), "# stickywave-csv v1\nevent_index,time,alpha,i,beta,j\n0,0.5,1,3,2,1\n");
  std::ostringstream cl;
  write_cluster_event_csv(cl, {{0.25, 1, ClusterEventKind::split, 0, 20}});
  EXPECT_EQ(cl.str(), "# stickywave-csv v1\ntime,type,kind,first,last\n0.25,2,split,1,20\n");
}

TEST(AffineFields, DeclaredConstantsSurviveAudit) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const FieldModel f = properties::random_affine_field(seed);
    EXPECT_TRUE(audit(f).ok()) << seed;
    EXPECT_GT(f.ush_gap, 0.0);
  }
}
