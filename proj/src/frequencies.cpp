#include "deltametry/frequencies.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>

#include "deltametry/error.hpp"

namespace deltametry {

namespace fs = std::filesystem;

FrequencyTable::FrequencyTable(std::vector<std::string> words, std::vector<DocumentId> doc_ids,
                               std::vector<double> values)
    : words_(std::move(words)), doc_ids_(std::move(doc_ids)), values_(std::move(values)) {
  if (values_.size() != words_.size() * doc_ids_.size()) {
    throw Error(ErrorKind::Dimension,
                fmt::format("frequency table has {} values for {} documents x {} words",
                            values_.size(), doc_ids_.size(), words_.size()));
  }
  std::unordered_set<std::string> seen_words;
  for (const auto& w : words_) {
    if (!seen_words.insert(w).second) {
      throw Error(ErrorKind::InvalidInput, "duplicate word '" + w + "' in frequency table");
    }
  }
  std::unordered_set<std::string> seen_docs;
  for (const auto& id : doc_ids_) {
    if (!seen_docs.insert(id.raw()).second) {
      throw Error(ErrorKind::InvalidInput, "duplicate document '" + id.raw() + "' in frequency table");
    }
  }
  for (std::size_t d = 0; d < doc_ids_.size(); ++d) {
    double sum = 0.0;
    for (std::size_t w = 0; w < words_.size(); ++w) {
      const double v = at(d, w);
      if (!(v >= 0.0 && v <= 100.0)) {
        throw Error(ErrorKind::InvalidInput,
                    fmt::format("frequency {} for '{}' in {} is outside [0, 100]", v, words_[w],
                                doc_ids_[d].raw()));
      }
      sum += v;
    }
    if (sum > 100.0 + 1e-9) {
      throw Error(ErrorKind::InvalidInput,
                  fmt::format("frequencies of {} sum to {} (> 100)", doc_ids_[d].raw(), sum));
    }
  }
}

std::vector<double> FrequencyTable::column(std::size_t word) const {
  std::vector<double> out(doc_count());
  for (std::size_t d = 0; d < doc_count(); ++d) out[d] = at(d, word);
  return out;
}

std::optional<std::size_t> FrequencyTable::find_doc(const DocumentId& id) const {
  const auto it = std::find(doc_ids_.begin(), doc_ids_.end(), id);
  if (it == doc_ids_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - doc_ids_.begin());
}

FrequencyTable FrequencyTable::with_columns(std::span<const std::size_t> columns) const {
  std::vector<std::string> words;
  words.reserve(columns.size());
  for (auto c : columns) words.push_back(words_.at(c));
  std::vector<double> values;
  values.reserve(doc_count() * columns.size());
  for (std::size_t d = 0; d < doc_count(); ++d) {
    for (auto c : columns) values.push_back(at(d, c));
  }
  return FrequencyTable(std::move(words), doc_ids_, std::move(values));
}

FrequencyTable FrequencyTable::with_rows(std::span<const std::size_t> rows) const {
  std::vector<DocumentId> ids;
  ids.reserve(rows.size());
  std::vector<double> values;
  values.reserve(rows.size() * word_count());
  for (auto r : rows) {
    ids.push_back(doc_ids_.at(r));
    const auto src = row(r);
    values.insert(values.end(), src.begin(), src.end());
  }
  return FrequencyTable(words_, std::move(ids), std::move(values));
}

FrequencyTable build_frequency_table(const std::vector<Document>& corpus,
                                     std::optional<std::size_t> mfw_count) {
  if (corpus.empty()) throw Error(ErrorKind::EmptyCorpus, "cannot build a table from an empty corpus");
  if (mfw_count && *mfw_count == 0) throw Error(ErrorKind::Usage, "mfw count must be at least 1");

  std::vector<const Document*> docs;
  docs.reserve(corpus.size());
  for (const auto& doc : corpus) {
    if (doc.token_count() == 0) {
      throw Error(ErrorKind::DegenerateDocument, "document " + doc.id().raw() + " has no tokens");
    }
    docs.push_back(&doc);
  }
  std::sort(docs.begin(), docs.end(), [](auto* a, auto* b) { return a->id() < b->id(); });

  std::vector<std::unordered_map<std::string_view, std::size_t>> counts(docs.size());
  std::unordered_map<std::string_view, std::size_t> totals;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    for (const auto& token : docs[d]->tokens()) {
      ++counts[d][token];
      ++totals[token];
    }
  }

  std::vector<std::pair<std::string_view, std::size_t>> ranking(totals.begin(), totals.end());
  std::sort(ranking.begin(), ranking.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (mfw_count && ranking.size() > *mfw_count) ranking.resize(*mfw_count);

  std::vector<std::string> words;
  words.reserve(ranking.size());
  for (const auto& [word, count] : ranking) words.emplace_back(word);

  std::vector<DocumentId> ids;
  std::vector<double> values;
  values.reserve(docs.size() * words.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    ids.push_back(docs[d]->id());
    const double tokens = static_cast<double>(docs[d]->token_count());
    for (const auto& [word, total] : ranking) {
      const auto it = counts[d].find(word);
      const double count = it == counts[d].end() ? 0.0 : static_cast<double>(it->second);
      values.push_back(100.0 * count / tokens);
    }
  }
  return FrequencyTable(std::move(words), std::move(ids), std::move(values));
}

namespace {

// Splits one line into whitespace-separated fields. Double-quoted fields may
// contain blanks; inside quotes both \" and "" stand for a literal quote.
std::vector<std::string> split_fields(const std::string& line, std::size_t line_no) {
  std::vector<std::string> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    std::string field;
    if (line[i] == '"') {
      ++i;
      bool closed = false;
      while (i < line.size()) {
        const char c = line[i];
        if (c == '\\' && i + 1 < line.size()) {
          field.push_back(line[i + 1]);
          i += 2;
        } else if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          i += 2;
        } else if (c == '"') {
          ++i;
          closed = true;
          break;
        } else {
          field.push_back(c);
          ++i;
        }
      }
      if (!closed) {
        throw Error(ErrorKind::Parse, fmt::format("line {}: unterminated quoted field", line_no));
      }
    } else {
      while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') {
        field.push_back(line[i++]);
      }
    }
    fields.push_back(std::move(field));
  }
  return fields;
}

bool all_ids(const std::vector<std::string>& labels) {
  return !labels.empty() && std::all_of(labels.begin(), labels.end(),
                                        [](const std::string& l) { return DocumentId::looks_like_id(l); });
}

std::string quote(const std::string& label) {
  std::string out = "\"";
  for (char c : label) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

FrequencyTable read_stylo_table(const fs::path& file, std::optional<TableOrientation> orientation) {
  std::error_code ec;
  if (!fs::exists(file, ec)) throw Error(ErrorKind::MissingInput, "table not found: " + file.string());
  std::ifstream in(file);
  if (!in) throw Error(ErrorKind::Io, "cannot open table " + file.string());

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    header = split_fields(line, line_no);
  }
  if (header.empty()) throw Error(ErrorKind::EmptyTable, "table " + file.string() + " is empty");

  std::vector<std::string> row_labels;
  std::vector<double> cells;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(line, line_no);
    if (fields.empty()) continue;
    if (row_labels.empty()) {
      // A header with one label per row field carries a corner cell.
      if (fields.size() == header.size()) {
        header.erase(header.begin());
      } else if (fields.size() != header.size() + 1) {
        throw Error(ErrorKind::Parse,
                    fmt::format("line {}: {} fields do not fit a header of {} labels", line_no,
                                fields.size(), header.size()));
      }
      width = header.size();
    }
    if (fields.size() != width + 1) {
      throw Error(ErrorKind::Parse,
                  fmt::format("line {}: expected {} fields, found {}", line_no, width + 1, fields.size()));
    }
    row_labels.push_back(fields[0]);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      const auto& text = fields[c];
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
        throw Error(ErrorKind::Parse, fmt::format("line {}, column {} ('{}'): non-numeric cell '{}'",
                                                  line_no, c, header[c - 1], text));
      }
      cells.push_back(value);
    }
  }
  if (row_labels.empty() || width == 0) {
    throw Error(ErrorKind::EmptyTable, "table " + file.string() + " has no data rows");
  }

  if (!orientation) {
    const bool rows_are_docs = all_ids(row_labels);
    const bool cols_are_docs = all_ids(header);
    if (rows_are_docs == cols_are_docs) {
      throw Error(ErrorKind::Orientation,
                  "cannot tell whether rows or columns of " + file.string() +
                      " are documents; pass an explicit orientation (docs-rows or words-rows)");
    }
    orientation = rows_are_docs ? TableOrientation::DocsRows : TableOrientation::WordsRows;
  }

  std::vector<DocumentId> ids;
  if (*orientation == TableOrientation::DocsRows) {
    for (const auto& label : row_labels) ids.push_back(DocumentId::parse(label));
    return FrequencyTable(std::move(header), std::move(ids), std::move(cells));
  }

  for (const auto& label : header) ids.push_back(DocumentId::parse(label));
  const std::size_t n_words = row_labels.size();
  std::vector<double> transposed(cells.size());
  for (std::size_t w = 0; w < n_words; ++w) {
    for (std::size_t d = 0; d < width; ++d) transposed[d * n_words + w] = cells[w * width + d];
  }
  return FrequencyTable(std::move(row_labels), std::move(ids), std::move(transposed));
}

void write_stylo_table(const FrequencyTable& table, const fs::path& file, TableOrientation orientation) {
  if (table.empty()) throw Error(ErrorKind::EmptyTable, "refusing to write an empty table");

  std::vector<std::string> col_labels;
  std::vector<std::string> row_labels;
  for (const auto& id : table.doc_ids()) {
    (orientation == TableOrientation::DocsRows ? row_labels : col_labels).push_back(id.raw());
  }
  (orientation == TableOrientation::DocsRows ? col_labels : row_labels) = table.words();

  std::string out;
  for (std::size_t c = 0; c < col_labels.size(); ++c) {
    if (c) out.push_back(' ');
    out += quote(col_labels[c]);
  }
  out.push_back('\n');
  for (std::size_t r = 0; r < row_labels.size(); ++r) {
    out += quote(row_labels[r]);
    for (std::size_t c = 0; c < col_labels.size(); ++c) {
      const double v = orientation == TableOrientation::DocsRows ? table.at(r, c) : table.at(c, r);
      out += fmt::format(" {:.15g}", v);
    }
    out.push_back('\n');
  }

  std::ofstream stream(file, std::ios::binary | std::ios::trunc);
  if (!stream || !stream.write(out.data(), static_cast<std::streamsize>(out.size()))) {
    throw Error(ErrorKind::Io, "cannot write table " + file.string());
  }
}

FrequencyTable select_mfw(const FrequencyTable& table, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::Usage, "mfw count must be at least 1");
  if (n >= table.word_count()) return table;
  std::vector<std::size_t> columns(n);
  std::iota(columns.begin(), columns.end(), std::size_t{0});
  return table.with_columns(columns);
}

}  // namespace deltametry
