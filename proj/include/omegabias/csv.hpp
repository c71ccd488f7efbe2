#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace omegabias {

/// Shortest-safe round-trip text for a double: 17 significant digits.
std::string format_double(double v);

/// Strict parse of a whole field; throws ParseError on trailing garbage.
double parse_double(std::string_view field);
std::uint64_t parse_uint(std::string_view field);

/// Splits on commas, trimming surrounding blanks from each field.
std::vector<std::string_view> split_fields(std::string_view line);

std::vector<std::string_view> split_lines(std::string_view text);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partial file. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Throws IoError when the file cannot be read.
std::string read_file(const std::filesystem::path& path);

}  // namespace omegabias
