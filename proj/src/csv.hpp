#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace matchmarket::csv {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);
/// Parses a full field as a double; throws InvalidInput on trailing garbage.
double parse_double(std::string_view field);

/// Quotes a field when it contains a comma, quote or line break.
std::string quote(std::string_view field);
/// Splits one RFC 4180 record. Quoted fields may contain commas and "".
std::vector<std::string> split_record(std::string_view line);

}  // namespace matchmarket::csv
