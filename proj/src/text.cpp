#include "cod2m/text.hpp"

#include <charconv>
#include <cmath>
#include <string>

#include "cod2m/error.hpp"

namespace cod2m::text {

std::string format_real(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_real(std::string_view s, std::string_view what) {
  s = trim(s);
  double out = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, out);
  if (s.empty() || res.ec != std::errc{} || res.ptr != last || !std::isfinite(out)) {
    throw ParseError("expected a real number for " + std::string(what) + ", got '" + std::string(s) + "'");
  }
  return out;
}

long long parse_int(std::string_view s, std::string_view what) {
  s = trim(s);
  long long out = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw ParseError("expected an integer for " + std::string(what) + ", got '" + std::string(s) + "'");
  }
  return out;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace cod2m::text
