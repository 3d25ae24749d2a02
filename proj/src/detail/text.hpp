#pragma once

#include "glem/error.hpp"

#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace glem::detail {

std::vector<std::string> split(std::string_view line, char sep);

/// Splits text into lines; accepts \n and \r\n, drops a trailing empty line.
std::vector<std::string> split_lines(std::string_view text);

double parse_double(std::string_view s, Status status, const std::string& what);
long long parse_int(std::string_view s, Status status, const std::string& what);

/// Shortest-round-trip style formatting: %.17g for doubles, %.9g for floats.
std::string format_double(double v);
std::string format_float(float v);

std::u32string decode_utf8(std::string_view s, const std::string& what);

} // namespace glem::detail
