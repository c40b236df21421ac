#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kupred::csv {

// RFC-4180 style: fields with comma, quote or newline are quoted, quotes doubled.
std::string escape(std::string_view field);
std::vector<std::string> split_line(std::string_view line);

// Reads a whole CSV file into rows of fields. Handles quoted fields that
// span lines. Throws IoError on unreadable paths.
std::vector<std::vector<std::string>> read_file(const std::string& path);
std::vector<std::vector<std::string>> parse(std::string_view text);

std::string join_row(const std::vector<std::string>& fields);

} // namespace kupred::csv
