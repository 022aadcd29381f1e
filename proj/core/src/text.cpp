#include "fpl/text.hpp"

#include "fpl/error.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace fpl {

std::string_view trim(std::string_view s)
{
  const auto* ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(std::string_view s, char sep)
{
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start)));
    if (pos == std::string_view::npos)
      break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view s, std::string_view what)
{
  s = trim(s);
  if (s == "inf" || s == "infinity" || s == "+inf")
    return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (!s.empty() && *first == '+')
    ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc() || ptr != last || std::isnan(v))
    throw InputError(std::string(what) + ": '" + std::string(s) + "' is not a number");
  return v;
}

long long parse_int(std::string_view s, std::string_view what)
{
  s = trim(s);
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw InputError(std::string(what) + ": '" + std::string(s) + "' is not an integer");
  return v;
}

std::string format_double(double v)
{
  if (std::isinf(v))
    return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

} // namespace fpl
