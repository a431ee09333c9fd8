#include "deltametry/imposters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "deltametry/delta.hpp"
#include "deltametry/error.hpp"
#include "parallel.hpp"

namespace deltametry {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// First `k` entries of `items` become a uniform sample without replacement.
void partial_shuffle(std::vector<std::size_t>& items, std::size_t k, RoundRng& rng) {
  for (std::size_t i = 0; i < k && i + 1 < items.size(); ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(items.size() - i));
    std::swap(items[i], items[j]);
  }
}

std::string r_style_number(double value) {
  std::string text = fmt::format("{:.2f}", value);
  while (text.back() == '0') text.pop_back();
  if (text.back() == '.') text.pop_back();
  return text;
}

}  // namespace

RoundRng::RoundRng(std::uint64_t seed, std::uint64_t round) {
  std::uint64_t s = seed;
  std::uint64_t r = round;
  state_ = splitmix64(s) ^ splitmix64(r);
}

std::uint64_t RoundRng::next() { return splitmix64(state_); }

std::uint64_t RoundRng::below(std::uint64_t bound) {
  // Rejection sampling on the top of the range removes modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x = next();
  while (x >= limit) x = next();
  return x % bound;
}

void ImpostersConfig::validate() const {
  if (iterations == 0) throw Error(ErrorKind::Usage, "imposters iterations must be positive");
  if (!(feature_fraction > 0.0 && feature_fraction <= 1.0)) {
    throw Error(ErrorKind::Usage, "imposters feature fraction must be in (0, 1]");
  }
  if (imposters_per_iteration && *imposters_per_iteration == 0) {
    throw Error(ErrorKind::Usage, "imposters per iteration must be positive");
  }
}

double imposters_score(const DocumentId& test, const std::string& candidate,
                       const FrequencyTable& table, const ImpostersConfig& config) {
  config.validate();
  const auto test_row = table.find_doc(test);
  if (!test_row) throw Error(ErrorKind::Lookup, "test document '" + test.raw() + "' is not in the table");

  std::vector<std::size_t> candidates;
  std::vector<std::size_t> pool;
  for (std::size_t d = 0; d < table.doc_count(); ++d) {
    if (d == *test_row) continue;
    (table.doc_ids()[d].author() == candidate ? candidates : pool).push_back(d);
  }
  if (candidates.empty()) {
    throw Error(ErrorKind::UnknownCandidate,
                "candidate '" + candidate + "' has no documents besides the test document");
  }
  if (pool.empty()) {
    throw Error(ErrorKind::DegenerateSetup, "no imposter documents for candidate '" + candidate + "'");
  }
  if (table.word_count() == 0) throw Error(ErrorKind::EmptyTable, "frequency table has no words");

  const std::size_t n_words = table.word_count();
  const auto n_features = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(config.feature_fraction * static_cast<double>(n_words) - 1e-9)), 1,
      n_words);
  const std::size_t n_imposters =
      config.imposters_per_iteration ? std::min(*config.imposters_per_iteration, pool.size()) : pool.size();

  std::vector<char> votes(config.iterations, 0);
  detail::parallel_for(config.iterations, [&](std::size_t round) {
    RoundRng rng(config.seed, round);
    std::vector<std::size_t> columns(n_words);
    std::iota(columns.begin(), columns.end(), std::size_t{0});
    partial_shuffle(columns, n_features, rng);
    columns.resize(n_features);
    std::sort(columns.begin(), columns.end());

    std::vector<std::size_t> imposters = pool;
    partial_shuffle(imposters, n_imposters, rng);
    imposters.resize(n_imposters);

    const FrequencyTable sampled = table.with_columns(columns);
    const ZMatrix z = zscore_transform(sampled, fit_zscores(sampled));
    if (z.cols() == 0) {
      throw Error(ErrorKind::InsufficientData,
                  fmt::format("imposters round {} sampled only zero-variance words", round));
    }
    auto nearest = [&](const std::vector<std::size_t>& rows) {
      double best = std::numeric_limits<double>::infinity();
      for (auto r : rows) best = std::min(best, burrows_delta(z.row(*test_row), z.row(r)));
      return best;
    };
    votes[round] = nearest(candidates) <= nearest(imposters) ? 1 : 0;
  });

  const auto wins = std::count(votes.begin(), votes.end(), 1);
  return static_cast<double>(wins) / static_cast<double>(config.iterations);
}

ImpostersReport imposters_all(const DocumentId& test, const FrequencyTable& table,
                              const ImpostersConfig& config) {
  const auto test_row = table.find_doc(test);
  if (!test_row) throw Error(ErrorKind::Lookup, "test document '" + test.raw() + "' is not in the table");
  std::set<std::string> authors;
  for (std::size_t d = 0; d < table.doc_count(); ++d) {
    if (d != *test_row) authors.insert(table.doc_ids()[d].author());
  }
  if (authors.size() < 2) {
    throw Error(ErrorKind::DegenerateSetup,
                fmt::format("imposters needs at least 2 candidate authors besides the test document, found {}",
                            authors.size()));
  }
  ImpostersReport report{test, {}, config};
  for (const auto& author : authors) report.scores[author] = imposters_score(test, author, table, config);
  return report;
}

std::string format_imposters_text(const ImpostersReport& report) {
  std::string out = "No candidate set specified; testing the following classes (one at a time):\n ";
  for (const auto& [author, score] : report.scores) out += " " + author + "  ";
  while (out.back() == ' ') out.pop_back();
  out += "\n \nTesting a given candidate against imposters...\n\n";
  for (const auto& [author, score] : report.scores) {
    out += fmt::format("{} \t {}\n", author, r_style_number(score));
  }
  std::size_t width = 4;
  for (const auto& [author, score] : report.scores) width = std::max(width, author.size());
  std::string names;
  std::string values;
  for (const auto& [author, score] : report.scores) {
    names += fmt::format("{:>{}} ", author, width);
    values += fmt::format("{:>{}.2f} ", score, width);
  }
  out += names + "\n" + values + "\n";
  return out;
}

std::string format_imposters_json(const ImpostersReport& report) {
  nlohmann::ordered_json doc;
  doc["test_doc"] = report.test_doc.raw();
  doc["scores"] = nlohmann::ordered_json::object();
  for (const auto& [author, score] : report.scores) doc["scores"][author] = score;
  auto& cfg = doc["config"];
  cfg["iterations"] = report.config.iterations;
  cfg["feature_fraction"] = report.config.feature_fraction;
  if (report.config.imposters_per_iteration) {
    cfg["imposters_per_iteration"] = *report.config.imposters_per_iteration;
  } else {
    cfg["imposters_per_iteration"] = "all";
  }
  cfg["seed"] = report.config.seed;
  return doc.dump(2) + "\n";
}

}  // namespace deltametry
