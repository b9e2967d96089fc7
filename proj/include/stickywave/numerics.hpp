#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace stickywave {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(double v) : sum_(v) {}

  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  void add(const CompensatedSum& other) {
    add(other.sum_);
    comp_ += other.comp_;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Ordinary least-squares slope of y against x. Requires at least two distinct x.
double least_squares_slope(std::span<const double> x, std::span<const double> y);

/// Parses a whole token as a double; throws ValidationError naming `context` otherwise.
double parse_double(std::string_view token, std::string_view context);

/// Comma-separated doubles. An empty string yields an empty list.
std::vector<double> parse_double_list(std::string_view text, std::string_view context);

}  // namespace stickywave
