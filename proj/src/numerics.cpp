#include "stickywave/numerics.hpp"

#include <charconv>
#include <string>

#include "stickywave/errors.hpp"

namespace stickywave {

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ValidationError("least_squares_slope needs two equally sized samples of length >= 2");
  }
  const double count = static_cast<double>(x.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= count;
  mean_y /= count;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mean_x) * (x[i] - mean_x);
    sxy += (x[i] - mean_x) * (y[i] - mean_y);
  }
  if (sxx == 0.0) throw ValidationError("least_squares_slope: all abscissae coincide");
  return sxy / sxx;
}

double parse_double(std::string_view token, std::string_view context) {
  double v = 0.0;
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (token.empty() || ec != std::errc{} || ptr != end) {
    throw ValidationError("malformed number '" + std::string(token) + "' in '" +
                          std::string(context) + "'");
  }
  return v;
}

std::vector<double> parse_double_list(std::string_view text, std::string_view context) {
  std::vector<double> out;
  if (text.empty()) return out;
  while (true) {
    const std::size_t comma = text.find(',');
    out.push_back(parse_double(text.substr(0, comma), context));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace stickywave
