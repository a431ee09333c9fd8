#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "deltametry/cluster.hpp"
#include "deltametry/corpus.hpp"
#include "deltametry/error.hpp"
#include "deltametry/frequencies.hpp"
#include "deltametry/imposters.hpp"

namespace deltametry::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class Output { Table, DistCsv, Dendrogram, Newick, Distribution, Heatmap, ImpostersReport };

std::string_view to_string(Output output);
Output parse_output(std::string_view name);  // throws Error(Usage)

struct RunConfig {
  std::string command = "run";
  std::filesystem::path input;
  std::optional<TableOrientation> orientation;  // nullopt: detect
  TokenizerConfig tokenizer;
  std::size_t mfw = 100;
  Linkage linkage = Linkage::Ward;
  ImpostersConfig imposters;
  bool seed_given = false;
  std::optional<std::string> test_doc;
  std::optional<std::pair<std::string, std::string>> highlight;
  std::vector<std::string> exclude_from_fit;
  bool author_coloring = true;
  std::set<Output> outputs;
  std::filesystem::path output_dir = ".";
};

/// Thrown by cmd_parse for --help; carries the usage text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses `deltametry <subcommand> [flags]` (args exclude the program name).
/// Values come from flags, then from the --config key=value file, then from
/// defaults. Throws Error(Usage) on bad input.
RunConfig cmd_parse(const std::vector<std::string>& args);

/// Parses a key=value config or manifest file (# starts a comment).
std::map<std::string, std::string> read_key_values(const std::filesystem::path& file);

/// Failure of one pipeline stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.kind(), cause.what()), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct RunManifest {
  std::vector<std::filesystem::path> artifacts;
  std::filesystem::path manifest_path;
  std::string text;
  std::string console;  // human-readable report printed by the CLI
};

/// Executes the pipeline and writes the requested artifacts plus
/// manifest.txt. On failure every file written so far is removed and a
/// StageError is thrown.
RunManifest run(const RunConfig& config);

/// 0 success, 2 usage, 3 input/parse, 4 numeric or degenerate data, 5 I/O.
int exit_code(ErrorKind kind);

/// Full CLI entry point; returns the process exit code.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace deltametry::cli
