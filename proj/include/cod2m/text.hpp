#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cod2m::text {

/// Decimal text with 17 significant digits; parses back to the identical double.
std::string format_real(double value);

/// Parses the whole of `s` as a double; throws ParseError naming `what` otherwise.
double parse_real(std::string_view s, std::string_view what);
long long parse_int(std::string_view s, std::string_view what);

std::vector<std::string_view> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);

}  // namespace cod2m::text
