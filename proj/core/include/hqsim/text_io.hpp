#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hqsim::text {

// Shortest representation that parses back to the identical double.
std::string format_double(double v);

double parse_double(std::string_view s);
long long parse_int(std::string_view s);
bool parse_bool(std::string_view s);

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

// "1..5" or "1,3,5" or "2".
std::vector<int> parse_int_list(std::string_view s);

}  // namespace hqsim::text
