#include "deltametry/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <set>

#include <fmt/format.h>

#include "deltametry/error.hpp"
#include "svg.hpp"

namespace deltametry {

using detail::coord;
using detail::xml_escape;

DistanceDistribution distance_distribution(
    const DistanceMatrix& m, const std::optional<std::pair<std::string, std::string>>& highlight_authors) {
  m.validate(1e-9);
  std::set<std::string> authors;
  for (const auto& id : m.doc_ids()) authors.insert(id.author());
  if (authors.size() < 2) {
    throw Error(ErrorKind::InsufficientData, "distance distribution needs documents by at least 2 authors");
  }
  if (highlight_authors) {
    for (const auto& a : {highlight_authors->first, highlight_authors->second}) {
      if (!authors.contains(a)) throw Error(ErrorKind::Lookup, "highlight author '" + a + "' has no document");
    }
  }

  DistanceDistribution dist;
  dist.highlight_authors = highlight_authors;
  const auto& ids = m.doc_ids();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      DocPair pair{ids[i], ids[j], m.at(i, j)};
      if (highlight_authors) {
        const auto& [a, b] = *highlight_authors;
        const auto& x = ids[i].author();
        const auto& y = ids[j].author();
        if ((x == a && y == b) || (x == b && y == a)) dist.highlight.push_back(pair);
      }
      (ids[i].author() == ids[j].author() ? dist.intra : dist.inter).push_back(std::move(pair));
    }
  }
  return dist;
}

PairStats summarize(const std::vector<DocPair>& pairs) {
  PairStats stats;
  stats.pairs = pairs.size();
  double sum = 0.0;
  for (const auto& p : pairs) {
    if (p.distance != p.distance) continue;
    if (stats.known == 0) {
      stats.min = stats.max = p.distance;
    } else {
      stats.min = std::min(stats.min, p.distance);
      stats.max = std::max(stats.max, p.distance);
    }
    sum += p.distance;
    ++stats.known;
  }
  if (stats.known > 0) stats.mean = sum / static_cast<double>(stats.known);
  return stats;
}

namespace {

// Quantile with linear interpolation between order statistics.
double quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::vector<double> known_distances(const std::vector<DocPair>& pairs) {
  std::vector<double> out;
  for (const auto& p : pairs) {
    if (p.distance == p.distance) out.push_back(p.distance);
  }
  return out;
}

}  // namespace

std::vector<double> histogram_edges(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::InsufficientData, "histogram of no values");
  std::sort(values.begin(), values.end());
  const double lo = values.front();
  const double hi = values.back();
  if (hi == lo) return {lo - 0.5, lo + 0.5};

  constexpr std::size_t kFallbackBins = 30;
  constexpr std::size_t kMaxBins = 200;
  const double iqr = quantile(values, 0.75) - quantile(values, 0.25);
  const double width = 2.0 * iqr / std::cbrt(static_cast<double>(values.size()));
  std::size_t bins = kFallbackBins;
  double step = (hi - lo) / static_cast<double>(bins);
  if (width > 0.0) {
    bins = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil((hi - lo) / width)), 1, kMaxBins);
    step = bins == kMaxBins ? (hi - lo) / static_cast<double>(bins) : width;
  }
  std::vector<double> edges;
  for (std::size_t k = 0; k <= bins; ++k) edges.push_back(lo + step * static_cast<double>(k));
  edges.back() = std::max(edges.back(), hi);
  return edges;
}

std::string distribution_svg(const DistanceDistribution& dist) {
  const auto intra = known_distances(dist.intra);
  const auto inter = known_distances(dist.inter);
  std::vector<double> all = intra;
  all.insert(all.end(), inter.begin(), inter.end());
  if (all.empty()) throw Error(ErrorKind::InsufficientData, "distribution has no known distances");

  const auto edges = histogram_edges(all);
  const std::size_t bins = edges.size() - 1;
  auto bin_of = [&](double v) {
    const auto it = std::upper_bound(edges.begin(), edges.end(), v);
    const auto k = static_cast<std::size_t>(std::distance(edges.begin(), it));
    return std::min(k == 0 ? 0 : k - 1, bins - 1);
  };
  std::vector<std::size_t> intra_counts(bins, 0);
  std::vector<std::size_t> inter_counts(bins, 0);
  for (double v : intra) ++intra_counts[bin_of(v)];
  for (double v : inter) ++inter_counts[bin_of(v)];
  const std::size_t peak = std::max(*std::max_element(intra_counts.begin(), intra_counts.end()),
                                    *std::max_element(inter_counts.begin(), inter_counts.end()));

  constexpr double kWidth = 820.0;
  constexpr double kHeight = 420.0;
  constexpr double kLeft = 60.0;
  constexpr double kRight = 780.0;
  constexpr double kTop = 40.0;
  constexpr double kBase = 300.0;
  const std::string intra_color = "#1f77b4";
  const std::string inter_color = "#ff69b4";
  const double lo = edges.front();
  const double hi = edges.back();
  auto x_of = [&](double v) { return kLeft + (v - lo) / (hi - lo) * (kRight - kLeft); };
  auto y_of = [&](std::size_t count) {
    return kBase - static_cast<double>(count) / static_cast<double>(std::max<std::size_t>(peak, 1)) * (kBase - kTop);
  };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"{0}\" height=\"{1}\" fill=\"#ffffff\"/>\n",
      coord(kWidth), coord(kHeight));

  // Range strips: where each class's distances live.
  const auto intra_stats = summarize(dist.intra);
  const auto inter_stats = summarize(dist.inter);
  auto band = [&](const char* cls, const PairStats& s, const std::string& color, double y, const char* name) {
    if (s.known == 0) return;
    svg += fmt::format(
        "<rect class=\"{}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"14\" fill=\"{}\" fill-opacity=\"0.35\"/>\n"
        "<text x=\"{}\" y=\"{}\" font-size=\"10\" fill=\"#333333\">{} (n={}, mean {:.4f})</text>\n",
        cls, coord(x_of(s.min)), coord(y), coord(std::max(x_of(s.max) - x_of(s.min), 1.0)), color,
        coord(x_of(s.min)), coord(y - 3.0), name, s.known, s.mean);
  };
  band("band-inter", inter_stats, inter_color, kBase + 60.0, "inter-author");
  band("band-intra", intra_stats, intra_color, kBase + 95.0, "intra-author");
  if (inter_stats.known > 0) {
    svg += fmt::format(
        "<line class=\"inter-mean\" x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"{3}\" "
        "stroke-dasharray=\"4 3\"/>\n",
        coord(x_of(inter_stats.mean)), coord(kTop), coord(kBase + 74.0), inter_color);
  }

  auto bars = [&](const char* cls, const std::vector<std::size_t>& counts, const std::string& color) {
    svg += fmt::format("<g class=\"{}\" fill=\"{}\" fill-opacity=\"0.5\">\n", cls, color);
    for (std::size_t k = 0; k < bins; ++k) {
      if (counts[k] == 0) continue;
      const double y = y_of(counts[k]);
      svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>\n", coord(x_of(edges[k])),
                         coord(y), coord(x_of(edges[k + 1]) - x_of(edges[k])), coord(kBase - y));
    }
    svg += "</g>\n";
  };
  bars("hist-inter", inter_counts, inter_color);
  bars("hist-intra", intra_counts, intra_color);

  auto rug = [&](const char* cls, const std::vector<double>& values, const std::string& color, double y) {
    for (double v : values) {
      svg += fmt::format("<line class=\"{0}\" x1=\"{1}\" y1=\"{2}\" x2=\"{1}\" y2=\"{3}\" stroke=\"{4}\"/>\n", cls,
                         coord(x_of(v)), coord(y), coord(y + 8.0), color);
    }
  };
  rug("rug-inter", inter, inter_color, kBase + 4.0);
  rug("rug-intra", intra, intra_color, kBase + 14.0);

  for (const auto& p : dist.highlight) {
    if (p.distance != p.distance) continue;
    svg += fmt::format(
        "<circle class=\"highlight\" cx=\"{}\" cy=\"{}\" r=\"4\" fill=\"#000000\"><title>{} x {}: {:.4f}</title>"
        "</circle>\n",
        coord(x_of(p.distance)), coord(kBase + 67.0), xml_escape(p.first.raw()), xml_escape(p.second.raw()),
        p.distance);
  }

  svg += fmt::format("<line x1=\"{0}\" y1=\"{2}\" x2=\"{1}\" y2=\"{2}\" stroke=\"#333333\"/>\n", coord(kLeft),
                     coord(kRight), coord(kBase));
  for (int tick = 0; tick <= 5; ++tick) {
    const double v = lo + (hi - lo) * tick / 5.0;
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" fill=\"#333333\">{:.3f}</text>\n",
                       coord(x_of(v)), coord(kBase + 40.0), v);
  }
  std::string title = "Distances: intra-author vs inter-author";
  if (dist.highlight_authors) {
    title += fmt::format(" (marked: {} x {})", dist.highlight_authors->first, dist.highlight_authors->second);
  }
  svg += fmt::format("<text x=\"{}\" y=\"22\" font-size=\"14\">{}</text>\n</svg>\n", coord(kLeft), xml_escape(title));
  return svg;
}

void render_distribution_svg(const DistanceDistribution& dist, const std::filesystem::path& out) {
  detail::write_text_file(out, distribution_svg(dist));
}

std::string heatmap_svg(const DistanceMatrix& m) {
  m.validate(1e-9);
  const std::size_t n = m.size();
  if (n == 0) throw Error(ErrorKind::InsufficientData, "heatmap of an empty matrix");
  double lo = 0.0;
  double hi = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (!m.known(i, j)) continue;
      lo = first ? m.at(i, j) : std::min(lo, m.at(i, j));
      hi = first ? m.at(i, j) : std::max(hi, m.at(i, j));
      first = false;
    }
  }

  constexpr double kCell = 24.0;
  std::size_t longest = 0;
  for (const auto& id : m.doc_ids()) longest = std::max(longest, id.raw().size());
  const double label_space = 12.0 + 7.0 * static_cast<double>(longest);
  const double grid_x = label_space;
  const double grid_y = label_space;
  const double grid = kCell * static_cast<double>(n);
  const double width = grid_x + grid + 140.0;
  const double height = grid_y + grid + 20.0;

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"11\">\n<rect width=\"{0}\" height=\"{1}\" fill=\"#ffffff\"/>\n",
      coord(width), coord(height));
  svg += "<g class=\"cells\">\n";
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const bool known = m.known(i, j);
      svg += fmt::format(
          "<rect class=\"{}\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\"><title>{} x {}: {}</title></rect>\n",
          known ? "cell" : "cell unknown", coord(grid_x + kCell * static_cast<double>(j)),
          coord(grid_y + kCell * static_cast<double>(i)), coord(kCell), coord(kCell),
          known ? detail::sequential_color(m.at(i, j), lo, hi) : std::string("#dddddd"),
          xml_escape(m.doc_ids()[i].raw()), xml_escape(m.doc_ids()[j].raw()),
          known ? fmt::format("{:.4f}", m.at(i, j)) : std::string("n/a"));
    }
  }
  svg += "</g>\n<g class=\"labels\" fill=\"#333333\">\n";
  for (std::size_t i = 0; i < n; ++i) {
    const double center = kCell * (static_cast<double>(i) + 0.5);
    const auto label = xml_escape(m.doc_ids()[i].raw());
    svg += fmt::format("<text class=\"row-label\" x=\"{}\" y=\"{}\" text-anchor=\"end\" dominant-baseline=\"middle\">{}</text>\n",
                       coord(grid_x - 6.0), coord(grid_y + center), label);
    svg += fmt::format(
        "<text class=\"col-label\" transform=\"translate({},{}) rotate(-90)\" dominant-baseline=\"middle\">{}</text>\n",
        coord(grid_x + center), coord(grid_y - 6.0), label);
  }
  svg += "</g>\n";

  // Color scale.
  const double scale_x = grid_x + grid + 30.0;
  constexpr int kSteps = 20;
  const double step_h = grid / kSteps;
  svg += "<g class=\"scale\">\n";
  for (int s = 0; s < kSteps; ++s) {
    const double v = hi - (hi - lo) * (s + 0.5) / kSteps;
    svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"20\" height=\"{}\" fill=\"{}\"/>\n", coord(scale_x),
                       coord(grid_y + step_h * s), coord(step_h + 0.5), detail::sequential_color(v, lo, hi));
  }
  svg += fmt::format("<text class=\"scale-max\" x=\"{}\" y=\"{}\" dominant-baseline=\"middle\">max {:.4f}</text>\n",
                     coord(scale_x + 26.0), coord(grid_y + 6.0), hi);
  svg += fmt::format("<text class=\"scale-min\" x=\"{}\" y=\"{}\" dominant-baseline=\"middle\">min {:.4f}</text>\n",
                     coord(scale_x + 26.0), coord(grid_y + grid - 6.0), lo);
  svg += "</g>\n</svg>\n";
  return svg;
}

void render_heatmap_svg(const DistanceMatrix& m, const std::filesystem::path& out) {
  detail::write_text_file(out, heatmap_svg(m));
}

namespace {

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::vector<std::vector<std::string>> parse_csv_records(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  std::size_t i = text.starts_with("\xEF\xBB\xBF") ? 3 : 0;
  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
    field_started = false;
  };
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
        field.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
      field_started = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      field_started = true;
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      continue;
    } else if (c == '\n') {
      end_record();
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (quoted) throw Error(ErrorKind::Parse, "csv: unterminated quoted field");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

}  // namespace

std::string distance_csv(const DistanceMatrix& m) {
  m.validate(1e-9);
  std::string out;
  for (const auto& id : m.doc_ids()) out += "," + csv_field(id.raw());
  out += "\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    out += csv_field(m.doc_ids()[i].raw());
    for (std::size_t j = 0; j < m.size(); ++j) {
      out += m.known(i, j) ? fmt::format(",{:.4f}", m.at(i, j)) : std::string(",");
    }
    out += "\n";
  }
  return out;
}

void export_distance_csv(const DistanceMatrix& m, const std::filesystem::path& out) {
  detail::write_text_file(out, distance_csv(m));
}

DistanceMatrix parse_distance_csv(const std::string& text) {
  const auto records = parse_csv_records(text);
  if (records.empty()) throw Error(ErrorKind::EmptyTable, "csv: no header row");
  const auto& header = records[0];
  if (header.size() < 2) throw Error(ErrorKind::EmptyTable, "csv: header lists no documents");
  const std::size_t n = header.size() - 1;
  if (records.size() != n + 1) {
    throw Error(ErrorKind::Parse, fmt::format("csv: {} documents in header but {} data rows", n, records.size() - 1));
  }
  std::vector<DocumentId> ids;
  for (std::size_t j = 1; j <= n; ++j) ids.push_back(DocumentId::parse(header[j]));
  std::vector<double> cells(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = records[i + 1];
    if (row.size() != n + 1) {
      throw Error(ErrorKind::Parse, fmt::format("csv row {}: expected {} fields, found {}", i + 2, n + 1, row.size()));
    }
    if (row[0] != header[i + 1]) {
      throw Error(ErrorKind::Parse,
                  fmt::format("csv row {}: label '{}' does not match column '{}'", i + 2, row[0], header[i + 1]));
    }
    for (std::size_t j = 0; j < n; ++j) {
      const auto& cell = row[j + 1];
      if (cell.empty()) {
        cells[i * n + j] = kUnknownDistance;
        continue;
      }
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
        throw Error(ErrorKind::Parse, fmt::format("csv row {}, column {}: non-numeric cell '{}'", i + 2, j + 2, cell));
      }
      cells[i * n + j] = value;
    }
  }
  DistanceMatrix m(std::move(ids), std::move(cells));
  m.validate(1e-9);
  return m;
}

DistanceMatrix read_distance_csv(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + file.string());
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_distance_csv(text);
}

}  // namespace deltametry
