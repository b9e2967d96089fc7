#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "stickywave/errors.hpp"
#include "stickywave/measures.hpp"

using namespace stickywave;

namespace {

// Composite Simpson on [a, b] with an even number of panels.
double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Integral of |F(x) - F_n(x)| over [lo, hi], F_n the empirical CDF of `atoms`,
// piecewise between atoms where F_n is constant. Second route to W1, through
// CDFs instead of quantiles.
double cdf_route_w1(const std::function<double(double)>& cdf, const std::vector<double>& atoms,
                    double lo, double hi) {
  std::vector<double> edges{lo};
  edges.insert(edges.end(), atoms.begin(), atoms.end());
  edges.push_back(hi);
  const double n = static_cast<double>(atoms.size());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (edges[i + 1] <= edges[i]) continue;
    const double level = static_cast<double>(i) / n;
    total += simpson([&](double x) { return std::abs(cdf(x) - level); }, edges[i], edges[i + 1], 200000);
  }
  return total;
}

}  // namespace

TEST(Measures, UniformQuantileAndCdf) {
  const Measure1D m = measures::uniform(2.0, 6.0);
  EXPECT_EQ(m.cdf(1.0), 0.0);
  EXPECT_EQ(m.cdf(4.0), 0.5);
  EXPECT_EQ(m.cdf(7.0), 1.0);
  EXPECT_EQ(m.quantile(0.25), 3.0);
  EXPECT_THROW(measures::uniform(1.0, 1.0), ValidationError);
}

TEST(Measures, LaplaceQuantileInvertsCdf) {
  const Measure1D m = measures::laplace(0.5, 2.0);
  for (double v : {1e-9, 0.01, 0.3, 0.5, 0.77, 0.999999}) {
    EXPECT_NEAR(m.cdf(m.quantile(v)), v, 1e-14);
  }
  EXPECT_NEAR(m.quantile_upper(1e-300), 0.5 + 2.0 * std::log(0.5e300), 1e-9);
}

TEST(Measures, ParetoAndStretchedExponentialFamilies) {
  const Measure1D p = measures::pareto(2.0);
  EXPECT_EQ(p.cdf(0.5), 0.0);
  EXPECT_NEAR(p.cdf(2.0), 0.75, 1e-15);
  EXPECT_NEAR(p.quantile(0.75), 2.0, 1e-14);
  EXPECT_TRUE(p.first_moment_finite);
  EXPECT_FALSE(measures::pareto(1.0).first_moment_finite);

  const Measure1D s = measures::stretched_exponential(0.5);
  for (double v : {0.1, 0.5, 0.9}) EXPECT_NEAR(s.cdf(s.quantile(v)), v, 1e-14);
  // Closed-form quantile integral against plain quadrature of the quantile.
  const double direct = simpson([&](double z) { return s.quantile(z); }, 0.1, 0.7, 2000);
  EXPECT_NEAR(s.quantile_integral(0.1, 0.7), direct, 1e-10);
}

TEST(Measures, AtomsMergeAndValidate) {
  const Measure1D m = measures::atoms({{1.0, 0.25}, {-1.0, 0.5}, {1.0, 0.25}});
  ASSERT_EQ(m.atom_list.size(), 2u);
  EXPECT_EQ(m.atom_list[0], (std::pair<double, double>{-1.0, 0.5}));
  EXPECT_EQ(m.atom_list[1], (std::pair<double, double>{1.0, 0.5}));
  EXPECT_EQ(m.quantile(0.5), -1.0);
  EXPECT_EQ(m.quantile(0.5000001), 1.0);
  EXPECT_THROW(measures::atoms({{0.0, 0.4}}), ValidationError);
  EXPECT_THROW(measures::atoms({}), ValidationError);
  EXPECT_TRUE(measures::laplace(0, 1).atom_list.empty());
}

TEST(Measures, ParseGrammar) {
  EXPECT_EQ(measures::parse("uniform:0,1").cdf(0.25), 0.25);
  EXPECT_EQ(measures::parse("heaviside:0").quantile(0.3), 0.0);
  EXPECT_EQ(measures::parse("dirac:2").quantile(0.3), 2.0);
  EXPECT_EQ(measures::parse("atoms:-1@0.5,1@0.5").quantile(0.9), 1.0);
  EXPECT_NEAR(measures::parse("pwl:0@0,1@0.5,3@1").cdf(2.0), 0.75, 1e-15);
  EXPECT_NEAR(measures::parse("laplace:0,1").cdf(0.0), 0.5, 1e-15);
  EXPECT_THROW(measures::parse("gauss:0,1"), ValidationError);
  EXPECT_THROW(measures::parse("uniform:0"), ValidationError);
  EXPECT_THROW(measures::parse("uniform"), ValidationError);
  EXPECT_THROW(measures::parse("atoms:1"), ValidationError);
  EXPECT_THROW(measures::parse("pareto:x"), ValidationError);
}

TEST(Measures, DiscreteMeasureValidation) {
  EXPECT_THROW(DiscreteMeasure({1.0, 0.0}), ValidationError);
  EXPECT_THROW(DiscreteMeasure(std::vector<double>{}), ValidationError);
  EXPECT_THROW(DiscreteMeasure({0.0, NAN}), ValidationError);
  EXPECT_NO_THROW(DiscreteMeasure({0.0, 0.0, 1.0}));
}

TEST(OptimalQuantize, MidpointQuantiles) {
  EXPECT_EQ(optimal_quantize(measures::uniform(0, 1), 2).vector(), (std::vector<double>{0.25, 0.75}));
  const auto lap = optimal_quantize(measures::laplace(0, 1), 2);
  EXPECT_NEAR(lap[0], -std::log(2.0), 1e-15);
  EXPECT_NEAR(lap[1], std::log(2.0), 1e-15);
  EXPECT_EQ(optimal_quantize(measures::parse("atoms:-1@0.5,1@0.5"), 4).vector(),
            (std::vector<double>{-1, -1, 1, 1}));
  EXPECT_THROW(optimal_quantize(measures::uniform(0, 1), 0), ValidationError);
}

TEST(ChiQuantize, CellMeansOfTheQuantile) {
  // x_k = 3 * integral of v over [(2k-1)/6, (2k+1)/6] = k/3.
  const auto chi = chi_quantize(measures::uniform(0, 1), 2);
  EXPECT_NEAR(chi[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(chi[1], 2.0 / 3.0, 1e-15);
  EXPECT_THROW(chi_quantize(measures::pareto(0.8), 4), ValidationError);
}

TEST(W1, UniformTwoPointQuantizer) {
  // Each half-cell contributes the integral of |v - 1/4| over [0, 1/2] = 1/16.
  EXPECT_NEAR(w1(measures::uniform(0, 1), optimal_quantize(measures::uniform(0, 1), 2)), 0.125, 1e-14);
}

TEST(W1, QuantileRouteMatchesCdfRoute) {
  for (const char* spec : {"uniform:-1,2", "laplace:0.3,0.7", "pwl:0@0,1@0.2,1.5@0.9,4@1", "stretchedexp:1"}) {
    const Measure1D m = measures::parse(spec);
    for (std::size_t n : {1u, 3u, 10u}) {
      const auto q = optimal_quantize(m, n);
      const double via_cdf = cdf_route_w1(m.cdf, q.vector(), -40.0, 60.0);
      EXPECT_NEAR(w1(m, q), via_cdf, 1e-6) << spec << " n=" << n;
    }
  }
}

TEST(W1, MeasurePairs) {
  EXPECT_NEAR(w1(measures::uniform(0, 1), measures::uniform(1, 2)), 1.0, 1e-12);
  EXPECT_NEAR(w1(measures::laplace(0, 1), measures::laplace(3, 1)), 3.0, 1e-9);
  // |v - 2v| integrated over (0, 1).
  EXPECT_NEAR(w1(measures::uniform(0, 1), measures::uniform(0, 2)), 0.5, 1e-12);
}

TEST(W1, DiscretePairsUseCommonRefinement) {
  EXPECT_NEAR(w1(DiscreteMeasure({0.0}), DiscreteMeasure({0.0, 1.0})), 0.5, 1e-15);
  EXPECT_NEAR(w1(DiscreteMeasure({0.0, 1.0}), DiscreteMeasure({0.5, 2.0})), 0.75, 1e-15);
  EXPECT_NEAR(w1(DiscreteMeasure({0.0, 1.0, 2.0}), DiscreteMeasure({0.0, 2.0})), 1.0 / 3.0, 1e-15);
}

TEST(W1, InfiniteFirstMomentIsSentinel) {
  const double d = w1(measures::pareto(1.0), optimal_quantize(measures::pareto(1.0), 8));
  EXPECT_TRUE(is_infinite_distance(d));
}

TEST(W1, UniformScalingLaw) {
  // Every cell contributes (b - a) / (4 n^2), hence n W1 = (b - a) / 4 exactly.
  for (std::size_t n : {1u, 7u, 64u, 4096u}) {
    const double d = w1(measures::uniform(-1, 2), optimal_quantize(measures::uniform(-1, 2), n));
    EXPECT_NEAR(static_cast<double>(n) * d, 0.75, 1e-9) << n;
  }
}

TEST(W1, CompactSupportBound) {
  const std::vector<std::pair<const char*, double>> compact = {
      {"uniform:0,3", 3.0}, {"pwl:-1@0,0@0.7,2@1", 3.0}, {"atoms:0@0.2,0.5@0.3,4@0.5", 4.0}};
  for (const auto& [spec, width] : compact) {
    const Measure1D m = measures::parse(spec);
    for (std::size_t n = 1; n <= 64; ++n) {
      EXPECT_LE(w1(m, optimal_quantize(m, n)), width / (2.0 * n) + 1e-12) << spec << " n=" << n;
    }
  }
}

TEST(SqrtBound, ClosedForms) {
  // Integral of sqrt(x (1 - x)) over [0, 1].
  EXPECT_NEAR(w1_upper_bound_sqrt(measures::uniform(0, 1)), std::numbers::pi / 8.0, 1e-9);
  // Laplace: with s = exp(-|x|)/2 the integral becomes 2 * integral over (0, 1/2]
  // of sqrt((1 - s) / s) ds = 2 (pi/4 + 1/2).
  EXPECT_NEAR(w1_upper_bound_sqrt(measures::laplace(0, 1)), std::numbers::pi / 2.0 + 1.0, 1e-8);
  // Exponential: integral over (0, 1] of sqrt((1 - s) / s) ds = pi / 2.
  EXPECT_NEAR(w1_upper_bound_sqrt(measures::stretched_exponential(1.0)), std::numbers::pi / 2.0, 1e-8);
}

TEST(SqrtBound, ParetoAgainstSubstitutedSimpson) {
  for (double alpha : {2.5, 3.0}) {
    // x = exp(z^2) removes the square-root behaviour at x = 1.
    const auto f = [alpha](double z) {
      if (z == 0.0) return 0.0;
      const double y = z * z;
      return std::sqrt(-std::expm1(-alpha * y)) * std::exp(y * (1.0 - 0.5 * alpha)) * 2.0 * z;
    };
    const double oracle = simpson(f, 0.0, 25.0, 200000);
    EXPECT_NEAR(w1_upper_bound_sqrt(measures::pareto(alpha)) / oracle, 1.0, 1e-6) << alpha;
  }
  EXPECT_TRUE(is_infinite_distance(w1_upper_bound_sqrt(measures::pareto(1.5))));
  EXPECT_TRUE(is_infinite_distance(w1_upper_bound_sqrt(measures::pareto(2.0))));
}

TEST(SqrtBound, BoundsTheQuantizationError) {
  for (const char* spec : {"laplace:0,1", "pareto:3", "stretchedexp:1", "uniform:0,1"}) {
    const Measure1D m = measures::parse(spec);
    const double bound = w1_upper_bound_sqrt(m);
    for (std::size_t n : {1u, 4u, 64u, 1024u}) {
      EXPECT_LE(w1(m, optimal_quantize(m, n)), bound / std::sqrt(static_cast<double>(n))) << spec;
    }
  }
}

TEST(TailRateFit, Families) {
  std::vector<std::size_t> ns;
  for (int p = 1; p <= 14; ++p) ns.push_back(std::size_t{1} << p);
  EXPECT_NEAR(tail_rate_fit(measures::uniform(0, 1), ns), -1.0, 1e-9);
  EXPECT_NEAR(tail_rate_fit(measures::pareto(2.0), ns), -0.5, 0.1);
  EXPECT_NEAR(tail_rate_fit(measures::pareto(1.5), ns), -1.0 / 3.0, 0.1);
  const std::vector<std::size_t> narrow{2, 4, 8, 16};
  EXPECT_THROW(tail_rate_fit(measures::uniform(0, 1), narrow), ValidationError);
  EXPECT_THROW(tail_rate_fit(measures::pareto(1.0), ns), ValidationError);
}
