#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace blockframe::text {

std::vector<std::string_view> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);

/// Parses a whole string as an integer; throws ValidationError naming `what`.
int parse_int(std::string_view s, std::string_view what);
double parse_double(std::string_view s, std::string_view what);

/// "1,2,3" -> {1,2,3}. Whitespace around items is ignored; an empty string
/// gives an empty list.
std::vector<int> parse_int_list(std::string_view s, std::string_view what);

std::string join(const std::vector<int>& values, std::string_view sep = ",");

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

}  // namespace blockframe::text
