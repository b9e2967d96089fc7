#pragma once

// Probability measures on the real line, Wasserstein-1 distances computed
// through quantile functions, and n-point discretisations.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace stickywave {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Sentinel returned by the W1 routines when the distance is infinite
/// (exactly one of the two measures has an infinite first moment).
inline constexpr double kInfiniteDistance = std::numeric_limits<double>::infinity();

inline bool is_infinite_distance(double d) { return d == kInfiniteDistance; }

/// A probability measure m on the line, exposed through its CDF F and the
/// left-continuous pseudo-inverse F^{-1}(v) = inf{x : F(x) >= v}.
///
/// quantile(0) and quantile(1) follow the edge convention inf/sup of the
/// quantile over (0, 1), which may be infinite.
struct Measure1D {
  std::string label;
  std::function<double(double)> cdf;
  std::function<double(double)> quantile;

  /// quantile(1 - w), evaluated without forming 1 - w. Optional; used for
  /// accuracy in upper tails.
  std::function<double(double)> quantile_complement;

  /// Closed form of the integral of quantile over [a, b] with 0 <= a <= b <= 1.
  /// Empty when no closed form is known (adaptive quadrature is used instead).
  std::function<double(double, double)> quantile_integral;

  std::optional<Interval> support_hint;
  bool first_moment_finite = true;

  /// Interior points of (0, 1) where the quantile jumps or has a kink.
  std::vector<double> quantile_breakpoints;

  /// (location, weight) pairs, sorted and merged, when the measure is purely
  /// atomic; empty otherwise.
  std::vector<std::pair<double, double>> atom_list;

  double quantile_upper(double w) const {
    return quantile_complement ? quantile_complement(w) : quantile(1.0 - w);
  }
};

/// The empirical measure (1/n) sum_k delta_{x_k} of a sorted vector of atoms.
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;
  /// Throws ValidationError if `atoms` is empty or not sorted nondecreasing.
  explicit DiscreteMeasure(std::vector<double> atoms);

  std::size_t size() const { return atoms_.size(); }
  std::span<const double> atoms() const { return atoms_; }
  const std::vector<double>& vector() const { return atoms_; }
  double operator[](std::size_t k) const { return atoms_[k]; }

 private:
  std::vector<double> atoms_;
};

namespace measures {

Measure1D uniform(double a, double b);
Measure1D dirac(double c);
/// Finitely many atoms given as (location, weight); weights must sum to 1.
Measure1D atoms(std::vector<std::pair<double, double>> locations_and_weights);
/// Laplace law with density exp(-|x - location| / scale) / (2 scale).
Measure1D laplace(double location, double scale);
/// F(x) = max(0, 1 - x^{-alpha}) on [1, inf); infinite first moment for alpha <= 1.
Measure1D pareto(double alpha);
/// F(x) = 1{x > 0} (1 - exp(-x^alpha)).
Measure1D stretched_exponential(double alpha);
/// Continuous piecewise-linear CDF through the knots (x_i, F_i): x strictly
/// increasing, F nondecreasing from 0 to 1.
Measure1D piecewise_linear_cdf(std::vector<std::pair<double, double>> knots);
Measure1D from_discrete(const DiscreteMeasure& mu);

/// Builds a measure from the text grammar used on the command line:
/// `uniform:a,b`, `atoms:x1@w1,x2@w2,...`, `laplace:loc,scale`, `pareto:alpha`,
/// `stretchedexp:alpha`, `heaviside:c`, `pwl:x0@F0,x1@F1,...`.
Measure1D parse(std::string_view spec);

}  // namespace measures

/// Integral over v in [a, b] of |quantile(v) - c|; exact when the measure has a
/// closed-form quantile integral, adaptive quadrature otherwise.
double quantile_abs_deviation(const Measure1D& m, double a, double b, double c,
                              double abs_tol = 1e-10);

/// W1(a, b) = integral over (0,1) of |F_a^{-1} - F_b^{-1}|.
double w1(const Measure1D& a, const Measure1D& b, double abs_tol = 1e-10);
double w1(const Measure1D& m, const DiscreteMeasure& mu, double abs_tol = 1e-10);
double w1(const DiscreteMeasure& mu, const Measure1D& m, double abs_tol = 1e-10);
/// Exact; sizes may differ (integration over the common refinement).
double w1(const DiscreteMeasure& a, const DiscreteMeasure& b);

/// x_k = F^{-1}((2k - 1) / (2n)), the W1-optimal n-point discretisation.
DiscreteMeasure optimal_quantize(const Measure1D& m, std::size_t n);

/// x_k = (n + 1) * integral of F^{-1} over [(2k-1)/(2(n+1)), (2k+1)/(2(n+1))].
DiscreteMeasure chi_quantize(const Measure1D& m, std::size_t n);

/// I = integral of sqrt(F (1 - F)) dx, so that W1(m, optimal_quantize(m, n)) <= I / sqrt(n).
/// Returns kInfiniteDistance when the integral diverges.
double w1_upper_bound_sqrt(const Measure1D& m);

/// Least-squares slope of log W1(m, optimal_quantize(m, n)) against log n.
/// Needs at least 4 counts spanning two decades.
double tail_rate_fit(const Measure1D& m, std::span<const std::size_t> n_values);

}  // namespace stickywave
