#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace marea::csv {

/// Splits one CSV line on commas and trims surrounding whitespace from each
/// field. No quoting: none of the formats here carry embedded commas.
std::vector<std::string_view> split(std::string_view line, char sep = ',');

std::string_view trim(std::string_view s);

/// Nine significant digits, '.' decimal separator, `inf`/`-inf`/`nan` literals.
std::string number(double v);

/// Parses a non-negative decimal integer; throws ParseError naming `field` on failure.
std::uint64_t parse_u64(std::string_view s, std::size_t line, const char* field);
std::int64_t parse_i64(std::string_view s, std::size_t line, const char* field);

}  // namespace marea::csv
