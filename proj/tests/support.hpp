#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "deltametry/delta.hpp"
#include "deltametry/frequencies.hpp"
#include "deltametry/report.hpp"

namespace testing {

inline std::filesystem::path data_dir() { return DELTAMETRY_TEST_DATA; }

inline deltametry::DistanceMatrix table1_excerpt() {
  return deltametry::read_distance_csv(data_dir() / "table1_excerpt.csv");
}
inline deltametry::DistanceMatrix table2_excerpt() {
  return deltametry::read_distance_csv(data_dir() / "table2_excerpt.csv");
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("deltametry-test-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

using Rows = std::vector<std::vector<double>>;

/// Random documents x words table; each row sums to at most `row_total`.
inline Rows random_rows(std::mt19937_64& rng, std::size_t docs, std::size_t words, double row_total = 60.0) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Rows rows(docs, std::vector<double>(words));
  for (auto& row : rows) {
    double sum = 0.0;
    for (auto& v : row) sum += (v = unit(rng) + 1e-3);
    const double scale = row_total * (0.5 + 0.5 * unit(rng)) / sum;
    for (auto& v : row) v *= scale;
  }
  return rows;
}

inline deltametry::FrequencyTable make_table(const Rows& rows, const std::vector<std::string>& ids = {}) {
  std::vector<std::string> words;
  for (std::size_t w = 0; w < rows.front().size(); ++w) words.push_back("w" + std::to_string(w));
  std::vector<deltametry::DocumentId> doc_ids;
  std::vector<double> values;
  for (std::size_t d = 0; d < rows.size(); ++d) {
    doc_ids.push_back(deltametry::DocumentId::parse(ids.empty() ? "A" + std::to_string(d) + "_doc" : ids[d]));
    values.insert(values.end(), rows[d].begin(), rows[d].end());
  }
  return deltametry::FrequencyTable(std::move(words), std::move(doc_ids), std::move(values));
}

inline deltametry::DistanceMatrix make_matrix(const std::vector<std::string>& ids, const Rows& d) {
  std::vector<deltametry::DocumentId> doc_ids;
  std::vector<double> cells;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    doc_ids.push_back(deltametry::DocumentId::parse(ids[i]));
    cells.insert(cells.end(), d[i].begin(), d[i].end());
  }
  return deltametry::DistanceMatrix(std::move(doc_ids), std::move(cells));
}

inline std::size_t count_occurrences(const std::string& text, const std::string& needle) {
  std::size_t count = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + needle.size())) ++count;
  return count;
}

}  // namespace testing
