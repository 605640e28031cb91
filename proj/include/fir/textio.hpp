#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace fir::textio {

// Shortest decimal form that round-trips the exact double.
std::string format_double(double v);

// Strict parsers; throw ParseError on anything but a full valid token.
double parse_double(std::string_view token, std::string_view context);
long long parse_int(std::string_view token, std::string_view context);

std::vector<std::string_view> split(std::string_view line, char sep);

// Whole-file line reader, strips trailing '\r'; IoError when unreadable.
std::vector<std::string> read_lines(const std::string& path);

void write_file(const std::string& path, std::string_view content);

}  // namespace fir::textio
