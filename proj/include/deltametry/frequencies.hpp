#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "deltametry/corpus.hpp"

namespace deltametry {

/// Document x word matrix of relative frequencies in percent of each
/// document's tokens. Words are kept in rank order. Construction validates
/// that values lie in [0, 100], that rows sum to at most 100 and that word
/// and document labels are distinct.
class FrequencyTable {
 public:
  FrequencyTable(std::vector<std::string> words, std::vector<DocumentId> doc_ids,
                 std::vector<double> values);

  const std::vector<std::string>& words() const noexcept { return words_; }
  const std::vector<DocumentId>& doc_ids() const noexcept { return doc_ids_; }

  std::size_t doc_count() const noexcept { return doc_ids_.size(); }
  std::size_t word_count() const noexcept { return words_.size(); }
  bool empty() const noexcept { return doc_ids_.empty() || words_.empty(); }

  double at(std::size_t doc, std::size_t word) const { return values_[doc * words_.size() + word]; }
  std::span<const double> row(std::size_t doc) const {
    return {values_.data() + doc * words_.size(), words_.size()};
  }
  std::vector<double> column(std::size_t word) const;

  /// Row-major [doc][word] storage.
  const std::vector<double>& values() const noexcept { return values_; }

  std::optional<std::size_t> find_doc(const DocumentId& id) const;

  /// Copy with the given word columns, in the given order.
  FrequencyTable with_columns(std::span<const std::size_t> columns) const;
  /// Copy with the given document rows, in the given order.
  FrequencyTable with_rows(std::span<const std::size_t> rows) const;

 private:
  std::vector<std::string> words_;
  std::vector<DocumentId> doc_ids_;
  std::vector<double> values_;
};

/// Ranks words by total raw count over the corpus (descending, ties broken
/// lexicographically) and keeps the top `mfw_count`. Rows are sorted by id.
/// Pass std::nullopt to keep the whole vocabulary.
FrequencyTable build_frequency_table(const std::vector<Document>& corpus,
                                     std::optional<std::size_t> mfw_count);

enum class TableOrientation { DocsRows, WordsRows };

/// Reads a whitespace-separated stylo table. With no explicit orientation,
/// the side whose labels all look like Author_Title is taken as documents.
FrequencyTable read_stylo_table(const std::filesystem::path& file,
                                std::optional<TableOrientation> orientation = std::nullopt);

/// Writes the stylo layout: a header line of quoted column labels, then one
/// line per row with a quoted label and 15 significant digits per value.
void write_stylo_table(const FrequencyTable& table, const std::filesystem::path& file,
                       TableOrientation orientation = TableOrientation::WordsRows);

/// First min(n, word_count) columns.
FrequencyTable select_mfw(const FrequencyTable& table, std::size_t n);

}  // namespace deltametry
