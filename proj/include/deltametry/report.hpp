#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "deltametry/corpus.hpp"
#include "deltametry/delta.hpp"

namespace deltametry {

struct DocPair {
  DocumentId first;
  DocumentId second;
  double distance;  // NaN when the matrix cell is unknown
};

/// Every unordered off-diagonal pair, split by whether both documents share
/// an author label. `highlight` holds the cross pairs of one named author
/// pair (both orders), a subset of intra + inter.
struct DistanceDistribution {
  std::vector<DocPair> intra;
  std::vector<DocPair> inter;
  std::vector<DocPair> highlight;
  std::optional<std::pair<std::string, std::string>> highlight_authors;
};

/// Throws Error(Lookup) when a highlight author has no document and
/// Error(InsufficientData) when the matrix holds fewer than two authors.
DistanceDistribution distance_distribution(
    const DistanceMatrix& m,
    const std::optional<std::pair<std::string, std::string>>& highlight_authors = std::nullopt);

/// Summary over the known distances of one pair class.
struct PairStats {
  std::size_t pairs = 0;  // including unknown cells
  std::size_t known = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

PairStats summarize(const std::vector<DocPair>& pairs);

/// Freedman-Diaconis bin edges over `values`; falls back to 30 equal bins
/// when the interquartile range is zero.
std::vector<double> histogram_edges(std::vector<double> values);

void render_distribution_svg(const DistanceDistribution& dist, const std::filesystem::path& out);
std::string distribution_svg(const DistanceDistribution& dist);

void render_heatmap_svg(const DistanceMatrix& m, const std::filesystem::path& out);
std::string heatmap_svg(const DistanceMatrix& m);

/// CSV with an empty corner cell, a header of ids and 4-decimal values.
/// Unknown cells are written empty.
void export_distance_csv(const DistanceMatrix& m, const std::filesystem::path& out);
std::string distance_csv(const DistanceMatrix& m);

DistanceMatrix read_distance_csv(const std::filesystem::path& file);
DistanceMatrix parse_distance_csv(const std::string& text);

}  // namespace deltametry
