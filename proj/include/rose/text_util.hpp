#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rose {

std::vector<std::string_view> split_lines(std::string_view text);
std::vector<std::string_view> split_ws(std::string_view text);
std::vector<std::string_view> split(std::string_view text, char sep);
std::string_view trim(std::string_view s);
// Drops everything from the first '#'.
std::string_view strip_comment(std::string_view line);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

std::uint64_t fnv1a(std::string_view data);

// Shortest round-tripping decimal form.
std::string format_double(double v);
// Throws syntax on anything but a complete decimal number.
double parse_double(std::string_view text);

}  // namespace rose
