#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace deltametry::detail {

std::string xml_escape(std::string_view text);

/// Fixed two-decimal coordinate; keeps SVG bytes stable.
std::string coord(double value);

/// Distinct colors for categorical labels (cycled past the end).
const std::string& palette_color(std::size_t index);

/// Maps a distance in [lo, hi] to a sequential color (light to dark).
std::string sequential_color(double value, double lo, double hi);

/// Writes `content` to `file`, throwing Error(Io) on failure.
void write_text_file(const std::filesystem::path& file, std::string_view content);

}  // namespace deltametry::detail
