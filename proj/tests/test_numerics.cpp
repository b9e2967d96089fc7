#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "stickywave/csv.hpp"
#include "stickywave/errors.hpp"
#include "stickywave/numerics.hpp"
#include "stickywave/quadrature.hpp"

using namespace stickywave;

TEST(Quadrature, SmoothIntegrands) {
  EXPECT_NEAR(quadrature::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi).value,
              2.0, 1e-12);
  EXPECT_NEAR(quadrature::integrate([](double x) { return std::exp(x); }, 0.0, 1.0).value,
              std::numbers::e - 1.0, 1e-12);
}

TEST(Quadrature, ReversedBoundsFlipSign) {
  const auto f = [](double x) { return x * x; };
  EXPECT_NEAR(quadrature::integrate(f, 1.0, 0.0).value, -1.0 / 3.0, 1e-14);
  EXPECT_EQ(quadrature::integrate(f, 2.0, 2.0).value, 0.0);
}

TEST(Quadrature, IntegrableEndpointSingularity) {
  // Integral of x^(-1/2) over (0, 1) is 2.
  const auto r = quadrature::integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0);
  EXPECT_NEAR(r.value, 2.0, 1e-9);
}

TEST(Quadrature, BreakpointsResolveSteps) {
  const auto step = [](double x) { return x < 0.3 ? 1.0 : (x < 0.7 ? 5.0 : -2.0); };
  const std::vector<double> cuts{0.3, 0.7};
  EXPECT_NEAR(quadrature::integrate(step, 0.0, 1.0, cuts).value, 0.3 + 2.0 - 0.6, 1e-14);
}

TEST(Quadrature, NonIntegrableSingularityThrows) {
  quadrature::Options opts;
  opts.max_intervals = 2000;
  EXPECT_THROW(quadrature::integrate([](double x) { return 1.0 / x; }, 0.0, 1.0, opts), NumericalError);
}

TEST(Quadrature, GaussLegendreExactOnPolynomials) {
  const auto& rule = quadrature::gauss_legendre_64();
  double weight_sum = 0.0;
  for (double w : rule.weights) weight_sum += w;
  EXPECT_NEAR(weight_sum, 2.0, 1e-14);
  // Degree 127 is integrated exactly; check x^40 on [-1, 2].
  const double got = quadrature::gauss_legendre([](double x) { return std::pow(x, 40); }, -1.0, 2.0);
  const double want = (std::pow(2.0, 41) + 1.0) / 41.0;
  EXPECT_NEAR(got / want, 1.0, 1e-13);
}

TEST(CompensatedSum, RecoversLostLowOrderBits) {
  CompensatedSum s;
  s.add(1.0);
  for (int i = 0; i < 1000; ++i) s.add(1e-16);
  s.add(-1.0);
  EXPECT_NEAR(s.value(), 1e-13, 1e-20);  // naive summation returns 0
}

TEST(LeastSquaresSlope, ExactLine) {
  const std::vector<double> x{0, 1, 2, 3};
  const std::vector<double> y{1, -1, -3, -5};
  EXPECT_NEAR(least_squares_slope(x, y), -2.0, 1e-15);
}

TEST(ParseDouble, AcceptsAndRejects) {
  EXPECT_EQ(parse_double("2.5", "ctx"), 2.5);
  EXPECT_EQ(parse_double("-1e-3", "ctx"), -1e-3);
  EXPECT_THROW(parse_double("2.5x", "ctx"), ValidationError);
  EXPECT_THROW(parse_double("", "ctx"), ValidationError);
  EXPECT_EQ(parse_double_list("1,2,3", "ctx"), (std::vector<double>{1, 2, 3}));
  EXPECT_TRUE(parse_double_list("", "ctx").empty());
  EXPECT_THROW(parse_double_list("1,,3", "ctx"), ValidationError);
}

TEST(Csv, NumbersRoundTripAndTextIsQuoted) {
  const double v = 0.1 + 0.2;
  EXPECT_EQ(std::stod(csv::num(v)), v);
  EXPECT_EQ(csv::num(0.5), "0.5");
  EXPECT_EQ(csv::text("burgers"), "burgers");
  EXPECT_EQ(csv::text("uniform:0,1"), "\"uniform:0,1\"");
  EXPECT_EQ(csv::text("a\"b"), "\"a\"\"b\"");
  EXPECT_EQ(csv::kVersionLine, "# stickywave-csv v1");
}
