#pragma once

// Small helpers shared by the TSV/CSV readers and report writers.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

namespace maub::text {

std::vector<std::string_view> split(std::string_view line, char sep);

// Strips a trailing '\r' and, on the first line of a file, a UTF-8 BOM.
std::string_view chomp(std::string_view line);

bool parse_double(std::string_view s, double& out);
bool parse_int(std::string_view s, long long& out);

// Shortest representation that round-trips; locale independent.
std::string format_double(double v);
// Fixed number of decimals; locale independent.
std::string format_fixed(double v, int decimals);

std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);

// FNV-1a over the raw bytes of a file.
std::uint64_t file_checksum(const std::filesystem::path& path);

}  // namespace maub::text
