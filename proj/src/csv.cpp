#include "marea/csv.hpp"

#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>

#include "marea/error.hpp"

namespace marea::csv {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::uint64_t parse_u64(std::string_view s, std::size_t line, const char* field) {
  if (!s.empty() && s.front() == '-') {
    throw ValidationError("line " + std::to_string(line) + ": negative value in field '" + field + "'");
  }
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError(line, std::string("expected a non-negative integer in field '") + field + "', got '" +
                               std::string(s) + "'");
  }
  return v;
}

std::int64_t parse_i64(std::string_view s, std::size_t line, const char* field) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) {
    throw ParseError(line, std::string("expected an integer in field '") + field + "', got '" + std::string(s) +
                               "'");
  }
  return v;
}

}  // namespace marea::csv
