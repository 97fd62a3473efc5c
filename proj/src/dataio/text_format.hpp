#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace ssal {

/// Shortest decimal that round-trips, independent of locale; NaN prints as "nan".
std::string format_double(double v);

/// Locale-independent parse of the whole (trimmed) cell; accepts "nan".
std::optional<double> parse_double(std::string_view text);

std::string_view trim(std::string_view s);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace ssal
