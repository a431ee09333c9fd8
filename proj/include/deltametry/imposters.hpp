#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "deltametry/corpus.hpp"
#include "deltametry/frequencies.hpp"

namespace deltametry {

struct ImpostersConfig {
  std::size_t iterations = 100;
  double feature_fraction = 0.5;
  /// Imposter documents drawn per round; nullopt uses the whole pool.
  std::optional<std::size_t> imposters_per_iteration;
  std::uint64_t seed = 0;

  void validate() const;  // throws Error(Usage)
};

struct ImpostersReport {
  DocumentId test_doc;
  std::map<std::string, double> scores;  // author -> share of rounds won, ordered by author
  ImpostersConfig config;
};

/// Share of rounds in which a candidate document is the test document's
/// nearest neighbour. Each round samples ceil(fraction * |words|) columns
/// without replacement, refits the z-model on those columns over every
/// document, and compares Delta from the test document to all candidate
/// and imposter documents; candidates win ties. Round r draws from a
/// substream derived from (seed, r), so rounds are reproducible in
/// isolation and can run in any order.
double imposters_score(const DocumentId& test, const std::string& candidate,
                       const FrequencyTable& table, const ImpostersConfig& config);

/// imposters_score for every author that owns a document besides `test`.
ImpostersReport imposters_all(const DocumentId& test, const FrequencyTable& table,
                              const ImpostersConfig& config);

/// Text block in the layout of the reference tool's console output.
std::string format_imposters_text(const ImpostersReport& report);

/// JSON with full-precision scores and the configuration.
std::string format_imposters_json(const ImpostersReport& report);

/// Deterministic per-round generator: splitmix64 over (seed, round).
class RoundRng {
 public:
  RoundRng(std::uint64_t seed, std::uint64_t round);

  std::uint64_t next();
  /// Uniform integer in [0, bound), bound > 0, without modulo bias.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

}  // namespace deltametry
