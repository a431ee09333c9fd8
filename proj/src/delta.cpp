#include "deltametry/delta.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include <fmt/format.h>

#include "deltametry/error.hpp"
#include "parallel.hpp"

namespace deltametry {

std::vector<std::size_t> ZScoreModel::degenerate() const {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < sd.size(); ++w) {
    if (sd[w] == 0.0) out.push_back(w);
  }
  return out;
}

ZScoreModel fit_zscores(const FrequencyTable& table, std::span<const std::size_t> rows) {
  if (rows.size() < 2) {
    throw Error(ErrorKind::InsufficientData,
                fmt::format("z-scores need at least 2 documents, got {}", rows.size()));
  }
  const std::size_t n_words = table.word_count();
  ZScoreModel model{table.words(), std::vector<double>(n_words), std::vector<double>(n_words)};
  const double n = static_cast<double>(rows.size());
  for (std::size_t w = 0; w < n_words; ++w) {
    double sum = 0.0;
    double lo = table.at(rows[0], w);
    double hi = lo;
    for (auto r : rows) {
      const double v = table.at(r, w);
      sum += v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    const double mean = sum / n;
    model.mean[w] = mean;
    // Constant columns are degenerate exactly, whatever the rounding in `mean`.
    if (lo == hi) {
      model.mean[w] = lo;
      continue;
    }
    double ss = 0.0;
    for (auto r : rows) {
      const double dev = table.at(r, w) - mean;
      ss += dev * dev;
    }
    model.sd[w] = std::sqrt(ss / (n - 1.0));
  }
  return model;
}

ZScoreModel fit_zscores(const FrequencyTable& table) {
  std::vector<std::size_t> rows(table.doc_count());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return fit_zscores(table, rows);
}

ZMatrix zscore_transform(const FrequencyTable& table, const ZScoreModel& model) {
  if (model.words != table.words() || model.mean.size() != model.words.size() ||
      model.sd.size() != model.words.size()) {
    throw Error(ErrorKind::ModelMismatch, "z-score model was fitted on a different word list");
  }
  ZMatrix z;
  z.rows = table.doc_count();
  for (std::size_t w = 0; w < model.words.size(); ++w) {
    if (model.sd[w] == 0.0) {
      z.dropped_words.push_back(model.words[w]);
    } else {
      z.columns.push_back(w);
    }
  }
  z.values.reserve(z.rows * z.columns.size());
  for (std::size_t d = 0; d < z.rows; ++d) {
    for (auto w : z.columns) z.values.push_back((table.at(d, w) - model.mean[w]) / model.sd[w]);
  }
  return z;
}

double burrows_delta(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) {
    throw Error(ErrorKind::Dimension,
                fmt::format("delta needs equal non-empty vectors, got {} and {}", a.size(), b.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return sum / static_cast<double>(a.size());
}

DistanceMatrix::DistanceMatrix(std::vector<DocumentId> doc_ids, std::vector<double> cells)
    : doc_ids_(std::move(doc_ids)), cells_(std::move(cells)) {
  if (cells_.size() != doc_ids_.size() * doc_ids_.size()) {
    throw Error(ErrorKind::Dimension, fmt::format("distance matrix needs {}x{} cells, got {}",
                                                  doc_ids_.size(), doc_ids_.size(), cells_.size()));
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : doc_ids_) {
    if (!seen.insert(id.raw()).second) {
      throw Error(ErrorKind::InvalidInput, "duplicate document '" + id.raw() + "' in distance matrix");
    }
  }
}

void DistanceMatrix::validate(double tolerance) const {
  for (std::size_t i = 0; i < size(); ++i) {
    if (at(i, i) != 0.0) {
      throw Error(ErrorKind::InvalidInput,
                  fmt::format("diagonal cell of {} is {}, expected 0", doc_ids_[i].raw(), at(i, i)));
    }
    for (std::size_t j = i + 1; j < size(); ++j) {
      const double a = at(i, j);
      const double b = at(j, i);
      if (known(i, j) != known(j, i) || (known(i, j) && std::abs(a - b) > tolerance)) {
        throw Error(ErrorKind::InvalidInput,
                    fmt::format("distance matrix is asymmetric at ({}, {}): {} vs {}",
                                doc_ids_[i].raw(), doc_ids_[j].raw(), a, b));
      }
      if (a < 0.0 || b < 0.0) {
        throw Error(ErrorKind::InvalidInput, fmt::format("negative distance between {} and {}",
                                                         doc_ids_[i].raw(), doc_ids_[j].raw()));
      }
    }
  }
}

bool DistanceMatrix::complete() const {
  return std::all_of(cells_.begin(), cells_.end(), [](double v) { return v == v; });
}

std::optional<std::size_t> DistanceMatrix::find(const DocumentId& id) const {
  const auto it = std::find(doc_ids_.begin(), doc_ids_.end(), id);
  if (it == doc_ids_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - doc_ids_.begin());
}

std::size_t DistanceMatrix::index_of(const DocumentId& id) const {
  if (auto i = find(id)) return *i;
  throw Error(ErrorKind::Lookup, "document '" + id.raw() + "' is not in the distance matrix");
}

DistanceMatrix distance_matrix(const FrequencyTable& full, const DistanceOptions& options) {
  const FrequencyTable table = select_mfw(full, options.mfw);

  std::vector<std::size_t> fit_rows;
  for (std::size_t d = 0; d < table.doc_count(); ++d) {
    const auto& id = table.doc_ids()[d];
    if (std::find(options.exclude_from_fit.begin(), options.exclude_from_fit.end(), id) ==
        options.exclude_from_fit.end()) {
      fit_rows.push_back(d);
    }
  }
  const auto z = zscore_transform(table, fit_zscores(table, fit_rows));
  if (z.cols() == 0) {
    throw Error(ErrorKind::InsufficientData, "every selected word has zero variance");
  }

  const std::size_t n = table.doc_count();
  std::vector<double> cells(n * n, 0.0);
  detail::parallel_for(n, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = burrows_delta(z.row(i), z.row(j));
      cells[i * n + j] = d;
      cells[j * n + i] = d;
    }
  });
  return DistanceMatrix(table.doc_ids(), std::move(cells));
}

std::pair<DocumentId, double> nearest_neighbor(const DistanceMatrix& m, const DocumentId& target) {
  const std::size_t t = m.index_of(target);
  std::optional<std::size_t> best;
  for (std::size_t j = 0; j < m.size(); ++j) {
    if (j == t || !m.known(t, j)) continue;
    if (!best || m.at(t, j) < m.at(t, *best) ||
        (m.at(t, j) == m.at(t, *best) && m.doc_ids()[j] < m.doc_ids()[*best])) {
      best = j;
    }
  }
  if (!best) {
    throw Error(ErrorKind::InsufficientData, "no other document has a known distance to " + target.raw());
  }
  return {m.doc_ids()[*best], m.at(t, *best)};
}

}  // namespace deltametry
