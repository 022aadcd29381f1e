#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fpl {

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

/// Full-string numeric parse; `inf`/`infinity` accepted. Throws InputError mentioning `what`.
double parse_double(std::string_view s, std::string_view what);
long long parse_int(std::string_view s, std::string_view what);

/// Shortest round-trip decimal representation.
std::string format_double(double v);

} // namespace fpl
