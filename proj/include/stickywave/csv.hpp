#pragma once

// Shared pieces of the versioned CSV outputs.

#include <charconv>
#include <string>
#include <string_view>

namespace stickywave::csv {

/// First line of every CSV file this project writes.
inline constexpr std::string_view kVersionLine = "# stickywave-csv v1";

/// Shortest decimal representation that round-trips.
inline std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Text cell, double-quoted when it contains a comma, quote or line break.
inline std::string text(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace stickywave::csv
