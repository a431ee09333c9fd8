#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "deltametry/corpus.hpp"
#include "deltametry/frequencies.hpp"

namespace deltametry {

/// Per-word mean and sample standard deviation (n - 1) of a frequency table.
struct ZScoreModel {
  std::vector<std::string> words;
  std::vector<double> mean;
  std::vector<double> sd;

  /// Word indices whose standard deviation is zero.
  std::vector<std::size_t> degenerate() const;
};

/// Throws Error(InsufficientData) with fewer than two documents.
ZScoreModel fit_zscores(const FrequencyTable& table);

/// Same, but the statistics only use the listed rows (leave-one-out fits).
ZScoreModel fit_zscores(const FrequencyTable& table, std::span<const std::size_t> rows);

/// Standardized [doc][word] matrix. Degenerate words are dropped; `columns`
/// maps each kept column back to its word index in the table.
struct ZMatrix {
  std::size_t rows = 0;
  std::vector<std::size_t> columns;
  std::vector<std::string> dropped_words;
  std::vector<double> values;

  std::size_t cols() const noexcept { return columns.size(); }
  std::span<const double> row(std::size_t r) const { return {values.data() + r * cols(), cols()}; }
};

/// Throws Error(ModelMismatch) when the word lists differ.
ZMatrix zscore_transform(const FrequencyTable& table, const ZScoreModel& model);

/// Mean absolute difference of two z-vectors. Throws Error(Dimension) on
/// unequal or zero length.
double burrows_delta(std::span<const double> a, std::span<const double> b);

/// Square document distance matrix. Cells may be NaN ("unknown") only in
/// matrices read from published excerpts; computed matrices are complete.
/// The constructor checks shape and id uniqueness; validate() checks the
/// metric invariants.
class DistanceMatrix {
 public:
  DistanceMatrix(std::vector<DocumentId> doc_ids, std::vector<double> cells);

  /// Throws Error(InvalidInput) on a non-zero diagonal, a negative cell, or
  /// |d[i][j] - d[j][i]| > tolerance (an unknown cell must be mirrored).
  void validate(double tolerance = 1e-9) const;

  const std::vector<DocumentId>& doc_ids() const noexcept { return doc_ids_; }
  std::size_t size() const noexcept { return doc_ids_.size(); }

  double at(std::size_t i, std::size_t j) const { return cells_[i * size() + j]; }
  bool known(std::size_t i, std::size_t j) const { return at(i, j) == at(i, j); }
  bool complete() const;

  std::optional<std::size_t> find(const DocumentId& id) const;
  std::size_t index_of(const DocumentId& id) const;  // throws Error(Lookup)

  const std::vector<double>& cells() const noexcept { return cells_; }

 private:
  std::vector<DocumentId> doc_ids_;
  std::vector<double> cells_;
};

inline constexpr double kUnknownDistance = std::numeric_limits<double>::quiet_NaN();

struct DistanceOptions {
  std::size_t mfw = 100;
  /// Documents left out when fitting the z-model (they are still measured).
  std::vector<DocumentId> exclude_from_fit;
};

/// Delta over the first `options.mfw` words, z-model fitted on the same
/// (truncated) table.
DistanceMatrix distance_matrix(const FrequencyTable& table, const DistanceOptions& options);

inline DistanceMatrix distance_matrix(const FrequencyTable& table, std::size_t mfw) {
  return distance_matrix(table, DistanceOptions{mfw, {}});
}

/// Closest other document with a known distance; ties go to the smaller id.
std::pair<DocumentId, double> nearest_neighbor(const DistanceMatrix& m, const DocumentId& target);

}  // namespace deltametry
