#include "svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "deltametry/error.hpp"

namespace deltametry::detail {

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string coord(double value) {
  // Avoid "-0.00".
  if (std::abs(value) < 0.005) value = 0.0;
  return fmt::format("{:.2f}", value);
}

const std::string& palette_color(std::size_t index) {
  static const std::array<std::string, 12> colors = {
      "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
      "#e377c2", "#17becf", "#7f7f7f", "#bcbd22", "#393b79", "#637939"};
  return colors[index % colors.size()];
}

std::string sequential_color(double value, double lo, double hi) {
  double t = hi > lo ? (value - lo) / (hi - lo) : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  // White-yellow to dark red.
  const double r = 255.0 - t * (255.0 - 128.0);
  const double g = 255.0 - t * 255.0;
  const double b = 204.0 - t * 204.0 * 0.9;
  return fmt::format("#{:02x}{:02x}{:02x}", static_cast<int>(std::lround(r)),
                     static_cast<int>(std::lround(g)), static_cast<int>(std::lround(b)));
}

void write_text_file(const std::filesystem::path& file, std::string_view content) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(content.data(), static_cast<std::streamsize>(content.size())) || !out.flush()) {
    throw Error(ErrorKind::Io, "cannot write " + file.string());
  }
}

}  // namespace deltametry::detail
