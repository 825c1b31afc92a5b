#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace noirkg {

std::string_view trim(std::string_view s);

// Trims surrounding whitespace and joins internal whitespace runs with '_'.
std::string normalize_identifier(std::string_view raw);

// True when every character is in [A-Za-z0-9_'.-] or is a typographic
// apostrophe (U+2019).
bool is_valid_identifier(std::string_view id);

// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_csv_record(std::string_view line);

// Splits text into lines, dropping a trailing '\r' from each.
std::vector<std::string> split_lines(std::string_view text);

std::vector<std::string> split_whitespace(std::string_view s);

// Shortest round-trip decimal representation.
std::string format_double(double value);

std::optional<long long> parse_integer(std::string_view s);
std::optional<double> parse_double(std::string_view s);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace noirkg
