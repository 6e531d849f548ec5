#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace bnk {

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

// `name = value` lines; blank lines and `#` comments ignored. Order preserved.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::istream& in);

// Whole-string parse; throws InputError mentioning `what` on failure.
double parse_double(std::string_view s, std::string_view what = "value");
long long parse_int(std::string_view s, std::string_view what = "value");

// Shortest representation that parses back to the same double.
std::string format_double(double v);

// Fixed number of decimals, for tables.
std::string format_fixed(double v, int decimals);

}  // namespace bnk
